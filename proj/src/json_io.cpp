#include "seqtest/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace seqtest {

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const char* what) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok)
            throw std::invalid_argument(std::string(what) + ": unknown key \"" + key + "\"");
    }
}

std::vector<double> doubles_from(const json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + ": array expected");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw std::invalid_argument(std::string(what) + ": number expected");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

json model_to_json(const Model& model) {
    json j;
    j["kind"] = to_string(model.kind);
    if (model.kind == ModelKind::GroupedNormal) j["group_size"] = model.group_size;
    return j;
}

Model model_from_json(const json& j) {
    reject_unknown_keys(j, {"kind", "group_size"}, "model");
    if (!j.contains("kind")) throw std::invalid_argument("model: missing \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "bernoulli") {
        if (j.contains("group_size"))
            throw std::invalid_argument("model: group_size only valid for grouped_normal");
        return Model::bernoulli();
    }
    if (kind == "normal") {
        if (j.contains("group_size"))
            throw std::invalid_argument("model: group_size only valid for grouped_normal");
        return Model::normal();
    }
    if (kind == "normal_trend") {
        if (j.contains("group_size"))
            throw std::invalid_argument("model: group_size only valid for grouped_normal");
        return Model::normal_trend();
    }
    if (kind == "grouped_normal") {
        if (!j.contains("group_size"))
            throw std::invalid_argument("model: grouped_normal needs group_size");
        const int m = j.at("group_size").get<int>();
        if (m < 1) throw std::invalid_argument("model: group_size must be >= 1");
        return Model::grouped_normal(m);
    }
    throw std::invalid_argument("model: unknown kind \"" + kind + "\"");
}

json spec_to_json(const TestSpec& spec) {
    json j;
    j["thetas"] = spec.thetas();
    j["evals"] = spec.evals();
    j["gammas"] = spec.gammas();
    std::vector<double> flat;
    for (int i = 0; i < spec.k(); ++i)
        for (int c = 0; c < spec.k(); ++c) flat.push_back(i == c ? 0.0 : spec.lambdas()(i, c));
    j["lambdas"] = flat;
    if (spec.horizon().bounded)
        j["horizon"] = spec.horizon().cap;
    else
        j["horizon"] = "unbounded";
    j["model"] = model_to_json(spec.model());
    return j;
}

TestSpec spec_from_json(const json& j) {
    reject_unknown_keys(j, {"thetas", "evals", "gammas", "lambdas", "horizon", "model"},
                        "spec");
    for (const char* key : {"thetas", "evals", "gammas", "lambdas", "horizon", "model"})
        if (!j.contains(key))
            throw std::invalid_argument(std::string("spec: missing key \"") + key + "\"");

    const std::vector<double> thetas = doubles_from(j.at("thetas"), "spec.thetas");
    const std::vector<double> evals = doubles_from(j.at("evals"), "spec.evals");
    const std::vector<double> gammas = doubles_from(j.at("gammas"), "spec.gammas");
    const std::vector<double> flat = doubles_from(j.at("lambdas"), "spec.lambdas");

    const int k = static_cast<int>(thetas.size());
    if (static_cast<int>(flat.size()) != k * k)
        throw std::invalid_argument("spec.lambdas: expected a row-major k*k array");
    Matrix lambdas(k, k, 0.0);
    for (int i = 0; i < k; ++i)
        for (int c = 0; c < k; ++c) {
            const double v = flat[static_cast<size_t>(i) * k + c];
            if (i == c && v != 0.0)
                throw std::invalid_argument("spec.lambdas: diagonal entries must be 0");
            lambdas(i, c) = v;
        }

    Horizon horizon;
    const json& h = j.at("horizon");
    if (h.is_string()) {
        if (h.get<std::string>() != "unbounded")
            throw std::invalid_argument("spec.horizon: integer or \"unbounded\" expected");
        horizon = Horizon::unbounded();
    } else if (h.is_number_integer()) {
        horizon = Horizon::finite(h.get<int>());
    } else {
        throw std::invalid_argument("spec.horizon: integer or \"unbounded\" expected");
    }

    return TestSpec(model_from_json(j.at("model")), thetas, evals, gammas, lambdas, horizon);
}

json policy_to_json(const LatticePolicy& policy) {
    json rows = json::array();
    for (int n = 1; n <= policy.horizon(); ++n) {
        json segs = json::array();
        int8_t prev = 127;
        for (int s = 0; s <= n; ++s) {
            const int8_t a = policy.action(n, s);
            if (a != prev) {
                const int file_action = a < 0 ? -1 : a + 1;  // accepted index 1-based in files
                segs.push_back(json::array({s, file_action}));
                prev = a;
            }
        }
        rows.push_back(std::move(segs));
    }
    json forced = json::array();
    int prev_f = -1;
    for (int s = 0; s <= policy.horizon(); ++s) {
        const int f = policy.forced(s) ? 1 : 0;
        if (f != prev_f) {
            forced.push_back(json::array({s, f}));
            prev_f = f;
        }
    }
    return json{{"schema", 1}, {"horizon", policy.horizon()}, {"rows", rows},
                {"forced", forced}};
}

LatticePolicy policy_from_json(const json& j) {
    reject_unknown_keys(j, {"schema", "horizon", "rows", "forced"}, "policy");
    const int N = j.at("horizon").get<int>();
    LatticePolicy policy(N);
    const json& rows = j.at("rows");
    if (static_cast<int>(rows.size()) != N)
        throw std::invalid_argument("policy: one row of segments per step expected");
    for (int n = 1; n <= N; ++n) {
        const json& segs = rows[static_cast<size_t>(n - 1)];
        int8_t current = LatticePolicy::kContinue;
        size_t seg = 0;
        for (int s = 0; s <= n; ++s) {
            while (seg < segs.size() && segs[seg][0].get<int>() == s) {
                const int a = segs[seg][1].get<int>();
                current = a < 0 ? LatticePolicy::kContinue : static_cast<int8_t>(a - 1);
                ++seg;
            }
            policy.set_action(n, s, current);
        }
    }
    if (j.contains("forced")) {
        const json& forced = j.at("forced");
        bool current = false;
        size_t seg = 0;
        for (int s = 0; s <= N; ++s) {
            while (seg < forced.size() && forced[seg][0].get<int>() == s) {
                current = forced[seg][1].get<int>() != 0;
                ++seg;
            }
            policy.set_forced(s, current);
        }
    }
    policy.validate();
    return policy;
}

json report_to_json(const TestReport& report) {
    json results = json::array();
    for (const ParamResult& r : report.results) {
        json jr{{"param", r.param}, {"accept", r.accept}, {"ess", r.ess},
                {"capped", r.capped}};
        if (!r.stop_dist.empty()) jr["stop_dist"] = r.stop_dist;
        if (!r.accept_se.empty()) jr["accept_se"] = r.accept_se;
        if (report.monte_carlo) jr["ess_se"] = r.ess_se;
        results.push_back(std::move(jr));
    }
    return json{{"schema", 1},
                {"monte_carlo", report.monte_carlo},
                {"reps", report.reps},
                {"weighted_ess", report.weighted_ess},
                {"results", results}};
}

TestReport report_from_json(const json& j) {
    reject_unknown_keys(j, {"schema", "monte_carlo", "reps", "weighted_ess", "results"},
                        "report");
    TestReport report;
    report.monte_carlo = j.at("monte_carlo").get<bool>();
    report.reps = j.at("reps").get<long>();
    report.weighted_ess = j.at("weighted_ess").get<double>();
    for (const json& jr : j.at("results")) {
        ParamResult r;
        r.param = jr.at("param").get<double>();
        r.accept = jr.at("accept").get<std::vector<double>>();
        r.ess = jr.at("ess").get<double>();
        r.capped = jr.at("capped").get<double>();
        if (jr.contains("stop_dist")) r.stop_dist = jr.at("stop_dist").get<std::vector<double>>();
        if (jr.contains("accept_se")) r.accept_se = jr.at("accept_se").get<std::vector<double>>();
        if (jr.contains("ess_se")) r.ess_se = jr.at("ess_se").get<double>();
        report.results.push_back(std::move(r));
    }
    return report;
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string report_to_csv(const TestReport& report) {
    std::ostringstream out;
    out << "kind,param,accept,estimate,se\n";
    for (const ParamResult& r : report.results) {
        for (size_t jx = 0; jx < r.accept.size(); ++jx) {
            out << "alpha," << format_full(r.param) << "," << (jx + 1) << ","
                << format_full(r.accept[jx]) << ",";
            if (!r.accept_se.empty()) out << format_full(r.accept_se[jx]);
            out << "\n";
        }
    }
    for (const ParamResult& r : report.results) {
        out << "ess," << format_full(r.param) << ",," << format_full(r.ess) << ",";
        if (report.monte_carlo) out << format_full(r.ess_se);
        out << "\n";
    }
    for (const ParamResult& r : report.results)
        out << "capped," << format_full(r.param) << ",," << format_full(r.capped) << ",\n";
    out << "weighted_ess,,," << format_full(report.weighted_ess) << ",\n";
    return out.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace seqtest
