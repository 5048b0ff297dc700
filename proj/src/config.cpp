#include "ggamma/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ggamma {

namespace {

using nlohmann::json;

// Field errors carry the dotted path and, when the key can be found in the
// source text, its line.
class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    [[noreturn]] void fail(const std::string& path, const std::string& msg) const
    {
        std::ostringstream os;
        if (const auto line = line_of(path)) os << "line " << *line << ": ";
        os << "field '" << path << "': " << msg;
        throw ConfigError(os.str());
    }

    void only(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) const
    {
        if (!obj.is_object()) fail(path, "expected a table");
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [k, v] : obj.items())
            if (!ok.count(k)) fail(join(path, k), "unknown key");
    }

    double number(const json& obj, const std::string& path, const char* key, double fallback) const
    {
        if (!obj.contains(key)) return fallback;
        const json& v = obj.at(key);
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            if (s == "inf") return infinity;
        }
        if (!v.is_number()) fail(join(path, key), "expected a number");
        return v.get<double>();
    }

    double positive(const json& obj, const std::string& path, const char* key, double fallback) const
    {
        const double x = number(obj, path, key, fallback);
        if (!(x > 0) || !std::isfinite(x)) fail(join(path, key), "must be positive and finite");
        return x;
    }

    int count(const json& obj, const std::string& path, const char* key, int fallback, int min) const
    {
        if (!obj.contains(key)) return fallback;
        const json& v = obj.at(key);
        if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
        const auto x = v.get<long long>();
        if (x < min || x > 1'000'000'000) fail(join(path, key), "must be at least " + std::to_string(min));
        return static_cast<int>(x);
    }

    bool flag(const json& obj, const std::string& path, const char* key, bool fallback) const
    {
        if (!obj.contains(key)) return fallback;
        if (!obj.at(key).is_boolean()) fail(join(path, key), "expected true or false");
        return obj.at(key).get<bool>();
    }

    std::string string(const json& obj, const std::string& path, const char* key, const std::string& fallback) const
    {
        if (!obj.contains(key)) return fallback;
        if (!obj.at(key).is_string()) fail(join(path, key), "expected a string");
        return obj.at(key).get<std::string>();
    }

    std::vector<double> list(const json& obj, const std::string& path, const char* key) const
    {
        if (!obj.contains(key)) return {};
        const json& v = obj.at(key);
        if (!v.is_array()) fail(join(path, key), "expected a list of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) fail(join(path, key), "expected a list of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    static std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

private:
    const std::string& text_;

    // first occurrence of each path component, searched after the previous one
    std::optional<int> line_of(const std::string& path) const
    {
        std::size_t pos = 0;
        std::stringstream ss(path);
        std::string part;
        while (std::getline(ss, part, '.')) {
            const auto at = text_.find("\"" + part + "\"", pos);
            if (at == std::string::npos) return std::nullopt;
            pos = at + 1;
        }
        return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<long>(pos), '\n'));
    }
};

WeightSpec read_weight(const Reader& rd, const json& obj, const std::string& path)
{
    if (!obj.is_object()) rd.fail(path, "expected a weight table");
    const std::string kind = rd.string(obj, path, "kind", "power");
    WeightSpec s;
    s.scale = rd.positive(obj, path, "scale", 1);
    if (kind == "power") {
        rd.only(obj, path, {"kind", "alpha", "scale"});
        s.kind = WeightKind::power;
        s.alpha = rd.number(obj, path, "alpha", 0);
    } else if (kind == "powerlog") {
        rd.only(obj, path, {"kind", "alpha", "beta", "scale"});
        s.kind = WeightKind::powerlog;
        s.alpha = rd.number(obj, path, "alpha", 0);
        s.beta = rd.number(obj, path, "beta", 0);
    } else if (kind == "piecewise") {
        rd.only(obj, path, {"kind", "breaks", "values", "scale"});
        s.kind = WeightKind::piecewise;
        s.breaks = rd.list(obj, path, "breaks");
        s.values = rd.list(obj, path, "values");
    } else if (kind == "table") {
        rd.only(obj, path, {"kind", "points", "values", "scale"});
        s.kind = WeightKind::table;
        s.points = rd.list(obj, path, "points");
        s.values = rd.list(obj, path, "values");
    } else {
        rd.fail(Reader::join(path, "kind"), "unknown weight kind '" + kind + "'");
    }
    return s;
}

json write_weight(const WeightSpec& s)
{
    json j{{"kind", to_string(s.kind)}};
    switch (s.kind) {
    case WeightKind::power: j["alpha"] = s.alpha; break;
    case WeightKind::powerlog:
        j["alpha"] = s.alpha;
        j["beta"] = s.beta;
        break;
    case WeightKind::piecewise:
        j["breaks"] = s.breaks;
        j["values"] = s.values;
        break;
    case WeightKind::table:
        j["points"] = s.points;
        j["values"] = s.values;
        break;
    }
    j["scale"] = s.scale;
    return j;
}

}  // namespace

RunConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
        throw ConfigError("line " + std::to_string(line) + ": " + e.what());
    }
    const Reader rd(text);
    rd.only(root, "", {"name", "params", "original", "domain", "weights", "grid", "tolerances", "covering", "oracle",
                       "checks", "seed", "output"});

    RunConfig c;
    c.name = rd.string(root, "", "name", "");
    const bool has_reduced = root.contains("params"), has_original = root.contains("original");
    if (has_reduced == has_original)
        rd.fail(has_reduced ? "original" : "params",
                has_reduced ? "give either 'params' or 'original', not both" : "one of 'params' or 'original' is required");
    if (has_reduced) {
        const json& p = root.at("params");
        rd.only(p, "params", {"p", "q", "r"});
        c.reduced = ParamTriple{rd.positive(p, "params", "p", 1), rd.positive(p, "params", "q", 1),
                                rd.positive(p, "params", "r", 1)};
    } else {
        const json& o = root.at("original");
        rd.only(o, "original", {"r1", "q1", "r2", "q2"});
        c.original = OriginalExponents{rd.positive(o, "original", "r1", 1), rd.positive(o, "original", "q1", 1),
                                       rd.positive(o, "original", "r2", 1), rd.positive(o, "original", "q2", 1)};
    }

    if (root.contains("domain")) {
        const json& d = root.at("domain");
        rd.only(d, "domain", {"L", "L_trunc"});
        c.L = rd.number(d, "domain", "L", 1);
        if (!(c.L > 0)) rd.fail("domain.L", "must be positive (or \"inf\")");
        c.L_trunc = rd.positive(d, "domain", "L_trunc", 1e6);
    }
    const Domain dom(c.L, c.L_trunc);

    const json weights = root.value("weights", json::object());
    const std::vector<std::pair<const char*, WeightSpec*>> slots =
        has_reduced ? std::vector<std::pair<const char*, WeightSpec*>>{{"u", &c.u}, {"delta", &c.delta}, {"v", &c.v}, {"w", &c.w}}
                    : std::vector<std::pair<const char*, WeightSpec*>>{
                          {"w1", &c.w1}, {"w2", &c.w2}, {"delta1", &c.delta1}, {"delta2", &c.delta2}};
    if (has_reduced) rd.only(weights, "weights", {"u", "delta", "v", "w"});
    else rd.only(weights, "weights", {"w1", "w2", "delta1", "delta2"});
    for (auto [key, slot] : slots) {
        const std::string path = std::string("weights.") + key;
        if (weights.contains(key)) *slot = read_weight(rd, weights.at(key), path);
        try {
            make_weight(*slot, dom);
        } catch (const InadmissibleSpec& e) {
            rd.fail(path, e.what());
        }
    }

    ReportSettings& s = c.settings;
    if (root.contains("grid")) {
        const json& g = root.at("grid");
        rd.only(g, "grid", {"n", "mode"});
        s.grid_n = rd.count(g, "grid", "n", s.grid_n, 8);
        const std::string mode = rd.string(g, "grid", "mode", to_string(s.grid_mode));
        try {
            s.grid_mode = grid_mode_from_string(mode);
        } catch (const BadCount&) {
            rd.fail("grid.mode", "expected log, linear or hybrid");
        }
    }
    if (root.contains("tolerances")) {
        const json& t = root.at("tolerances");
        rd.only(t, "tolerances", {"esup", "quad"});
        s.esup_tol = rd.positive(t, "tolerances", "esup", s.esup_tol);
        s.quad_tol = rd.positive(t, "tolerances", "quad", s.quad_tol);
    }
    if (root.contains("covering")) {
        const json& cv = root.at("covering");
        rd.only(cv, "covering", {"a"});
        s.a = rd.number(cv, "covering", "a", s.a);
        if (!(s.a > 1) || !std::isfinite(s.a)) rd.fail("covering.a", "must be a finite number above 1");
    }
    if (root.contains("oracle")) {
        const json& o = root.at("oracle");
        rd.only(o, "oracle", {"restarts", "iterations", "pieces", "decades"});
        s.budget.restarts = rd.count(o, "oracle", "restarts", s.budget.restarts, 1);
        s.budget.iterations = rd.count(o, "oracle", "iterations", s.budget.iterations, 0);
        s.budget.pieces = rd.count(o, "oracle", "pieces", s.budget.pieces, 1);
        s.budget.decades = rd.positive(o, "oracle", "decades", s.budget.decades);
    }
    if (root.contains("checks")) {
        const json& k = root.at("checks");
        rd.only(k, "checks", {"discrete", "alternates"});
        s.discrete = rd.flag(k, "checks", "discrete", s.discrete);
        s.alternates = rd.flag(k, "checks", "alternates", s.alternates);
    }
    if (root.contains("seed")) {
        const json& v = root.at("seed");
        if (!v.is_number_unsigned()) rd.fail("seed", "expected a nonnegative integer");
        s.seed = v.get<std::uint64_t>();
    }
    if (root.contains("output")) {
        const json& o = root.at("output");
        rd.only(o, "output", {"report", "curves"});
        c.report_path = rd.string(o, "output", "report", "");
        c.curves_path = rd.string(o, "output", "curves", "");
    }
    return c;
}

RunConfig load_config(const std::string& path) { return parse_config(read_text(path)); }

std::string serialize_config(const RunConfig& c)
{
    json j;
    if (!c.name.empty()) j["name"] = c.name;
    if (c.reduced) {
        j["params"] = {{"p", c.reduced->p}, {"q", c.reduced->q}, {"r", c.reduced->r}};
        j["weights"] = {{"u", write_weight(c.u)}, {"delta", write_weight(c.delta)}, {"v", write_weight(c.v)},
                        {"w", write_weight(c.w)}};
    } else if (c.original) {
        j["original"] = {{"r1", c.original->r1}, {"q1", c.original->q1}, {"r2", c.original->r2}, {"q2", c.original->q2}};
        j["weights"] = {{"w1", write_weight(c.w1)}, {"w2", write_weight(c.w2)}, {"delta1", write_weight(c.delta1)},
                        {"delta2", write_weight(c.delta2)}};
    }
    j["domain"] = {{"L", std::isfinite(c.L) ? json(c.L) : json("inf")}, {"L_trunc", c.L_trunc}};
    const ReportSettings& s = c.settings;
    j["grid"] = {{"n", s.grid_n}, {"mode", to_string(s.grid_mode)}};
    j["tolerances"] = {{"esup", s.esup_tol}, {"quad", s.quad_tol}};
    j["covering"] = {{"a", s.a}};
    j["oracle"] = {{"restarts", s.budget.restarts},
                   {"iterations", s.budget.iterations},
                   {"pieces", s.budget.pieces},
                   {"decades", s.budget.decades}};
    j["checks"] = {{"discrete", s.discrete}, {"alternates", s.alternates}};
    j["seed"] = s.seed;
    j["output"] = {{"report", c.report_path}, {"curves", c.curves_path}};
    return j.dump(2) + "\n";
}

std::string config_template()
{
    return R"({
  // Exponents of the reduced inequality.  Replace this block by
  //   "original": {"r1": 1, "q1": 1, "r2": 1, "q2": 1}
  // to give the two-space form instead (then weights are w1, w2, delta1, delta2).
  "params": {"p": 1, "q": 1, "r": 1},

  // (0, L); "inf" for the half-line, which is computed on (0, L_trunc)
  "domain": {"L": 1, "L_trunc": 1e6},

  // kinds: power {alpha}, powerlog {alpha, beta}, piecewise {breaks, values},
  // table {points, values}; every kind takes an optional "scale" (default 1)
  "weights": {
    "u": {"kind": "power", "alpha": 0},
    "delta": {"kind": "power", "alpha": 0},
    "v": {"kind": "power", "alpha": 0},
    "w": {"kind": "power", "alpha": 0}
  },

  // mode: log | linear | hybrid; n >= 8
  "grid": {"n": 512, "mode": "log"},
  "tolerances": {"esup": 1e-6, "quad": 1e-9},

  // ratio of the covering sequence used for the discrete constants
  "covering": {"a": 109},

  // step functions with `pieces` pieces spanning `decades` decades below L
  "oracle": {"restarts": 48, "iterations": 400, "pieces": 64, "decades": 8},

  "checks": {"discrete": true, "alternates": true},
  "seed": 1,

  // empty report path prints to stdout; empty curves path skips the curve dump
  "output": {"report": "", "curves": ""}
}
)";
}

std::pair<ParamTriple, WeightSet> resolve(const RunConfig& c)
{
    const Domain dom(c.L, c.L_trunc);
    if (c.reduced)
        return {*c.reduced, WeightSet(make_weight(c.u, dom), make_weight(c.delta, dom), make_weight(c.v, dom),
                                      make_weight(c.w, dom))};
    if (!c.original) throw ConfigError("config has neither 'params' nor 'original'");
    const OriginalParams o{*c.original, make_weight(c.w1, dom), make_weight(c.w2, dom), make_weight(c.delta1, dom),
                           make_weight(c.delta2, dom)};
    return reduce_parameters(o);
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace ggamma
