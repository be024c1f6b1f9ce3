#include "doeblin/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doeblin/errors.hpp"

namespace doeblin::io {

namespace {

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

double real_of(const json& j, const char* what) {
    if (!j.is_number()) throw InputError(std::string(what) + ": expected a number");
    return j.get<double>();
}

int int_of(const json& j, const char* what) {
    if (!j.is_number_integer()) throw InputError(std::string(what) + ": expected an integer");
    return j.get<int>();
}

cplx complex_of(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw InputError("complex entry must be a number or [re, im]");
}

ComplexVector vector_of(const json& j) {
    if (!j.is_array() || j.empty()) throw InputError("vector must be a non-empty array");
    ComplexVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = complex_of(j[k]);
    return v;
}

std::vector<HermitianOperator> operator_list(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw InputError(std::string(what) + ": expected a non-empty list of matrices");
    std::vector<HermitianOperator> out;
    for (const auto& m : j) out.push_back(hermitian_from_json(m));
    return out;
}

void check_dims(const Channel& ch, const json& j) {
    if (j.contains("d_in") && int_of(j["d_in"], "d_in") != ch.d_in())
        throw InputError("channel: d_in does not match payload");
    if (j.contains("d_out") && int_of(j["d_out"], "d_out") != ch.d_out())
        throw InputError("channel: d_out does not match payload");
}

const char* status_name(SolveStatus s) { return to_string(s); }

}  // namespace

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

json read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

ComplexMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw InputError("matrix must be a nested array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw InputError("matrix rows have unequal lengths");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_of(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

HermitianOperator hermitian_from_json(const json& j) {
    const ComplexMatrix m = matrix_from_json(j);
    if (m.rows() != m.cols()) throw InputError("operator must be square");
    return HermitianOperator(m);
}

QuantumState state_from_json(const json& j) {
    if (j.is_array() && !j.empty() && !j[0].is_array()) return QuantumState::pure(vector_of(j));
    return QuantumState(hermitian_from_json(j));
}

Channel channel_from_json(const json& j) {
    if (!j.is_object()) throw InputError("channel must be a JSON object");
    const json& kind_j = field(j, "kind");
    if (!kind_j.is_string()) throw InputError("channel kind must be a string");
    const std::string kind = kind_j.get<std::string>();

    Channel ch = [&]() -> Channel {
        if (kind == "kraus") {
            const json& list = field(j, "kraus");
            if (!list.is_array() || list.empty()) throw InputError("kraus: expected a non-empty list");
            std::vector<ComplexMatrix> ks;
            for (const auto& k : list) ks.push_back(matrix_from_json(k));
            const int d_in = j.contains("d_in") ? int_of(j["d_in"], "d_in") : static_cast<int>(ks[0].cols());
            const int d_out = j.contains("d_out") ? int_of(j["d_out"], "d_out") : static_cast<int>(ks[0].rows());
            return channel_from_kraus(ks, d_in, d_out);
        }
        if (kind == "choi") {
            const int d_in = int_of(field(j, "d_in"), "d_in");
            const int d_out = int_of(field(j, "d_out"), "d_out");
            return Channel::from_choi(d_in, d_out, hermitian_from_json(field(j, "choi")));
        }
        if (kind == "gad")
            return make_channel(family::Gad{real_of(field(j, "p"), "p"), real_of(field(j, "eta"), "eta")});
        if (kind == "cq") return make_channel(family::Cq{operator_list(field(j, "states"), "cq states")});
        if (kind == "measurement") return make_channel(family::Measurement{operator_list(field(j, "povm"), "povm")});
        if (kind == "dephasing") {
            const json& list = field(j, "vectors");
            if (!list.is_array() || list.empty()) throw InputError("dephasing: expected a non-empty list of vectors");
            std::vector<ComplexVector> vs;
            for (const auto& v : list) vs.push_back(vector_of(v));
            return make_channel(family::Dephasing{vs});
        }
        if (kind == "depolarizing") {
            const int d = j.contains("d_in") ? int_of(j["d_in"], "d_in") : int_of(field(j, "dim"), "dim");
            return make_channel(family::Depolarizing{d, real_of(field(j, "q"), "q")});
        }
        if (kind == "replacer") {
            const int d_in = int_of(field(j, "d_in"), "d_in");
            return make_channel(family::Replacer{d_in, state_from_json(field(j, "state")).density()});
        }
        if (kind == "stokes") {
            const json& tj = field(j, "t");
            const json& Tj = field(j, "T");
            if (!tj.is_array() || tj.size() != 3) throw InputError("stokes: t must have three entries");
            if (!Tj.is_array() || Tj.size() != 3) throw InputError("stokes: T must be 3x3");
            family::Stokes s;
            for (int a = 0; a < 3; ++a) {
                s.t(a) = real_of(tj[a], "stokes t");
                if (!Tj[a].is_array() || Tj[a].size() != 3) throw InputError("stokes: T must be 3x3");
                for (int b = 0; b < 3; ++b) s.T(a, b) = real_of(Tj[a][b], "stokes T");
            }
            return make_channel(s);
        }
        if (kind == "classical") {
            const json& wj = field(j, "W");
            if (!wj.is_array() || wj.empty() || !wj[0].is_array()) throw InputError("classical: W must be a matrix");
            Eigen::MatrixXd w(wj.size(), wj[0].size());
            for (std::size_t r = 0; r < wj.size(); ++r) {
                if (!wj[r].is_array() || wj[r].size() != wj[0].size()) throw InputError("classical: ragged W");
                for (std::size_t c = 0; c < wj[r].size(); ++c) w(r, c) = real_of(wj[r][c], "classical W");
            }
            return make_channel(family::Classical{w});
        }
        throw InputError("unknown channel kind \"" + kind + "\"");
    }();
    check_dims(ch, j);
    return ch;
}

Ensemble ensemble_from_json(const json& j) {
    Ensemble e;
    const json& states = field(j, "states");
    if (!states.is_array() || states.empty()) throw InputError("ensemble: expected a non-empty state list");
    for (const auto& s : states) e.states.push_back(state_from_json(s));
    if (j.contains("priors")) {
        const json& p = j["priors"];
        if (!p.is_array()) throw InputError("ensemble: priors must be an array");
        for (const auto& x : p) e.priors.push_back(real_of(x, "prior"));
    } else {
        e.priors.assign(e.states.size(), 1.0 / static_cast<double>(e.states.size()));
    }
    e.validate();
    return e;
}

NoisyCircuitSpec circuit_from_json(const json& j) {
    if (!j.is_object()) throw InputError("circuit must be a JSON object");
    NoisyCircuitSpec spec;
    spec.n_qudits = j.contains("n_qudits") ? int_of(j["n_qudits"], "n_qudits") : 1;
    spec.d = j.contains("d") ? int_of(j["d"], "d") : 2;
    spec.dim_R = j.contains("dim_R") ? int_of(j["dim_R"], "dim_R") : 1;
    const int ds = spec.system_dim();
    if (spec.dim_R < 1 || spec.dim_R * ds > 64) throw InputError("circuit: bad dim_R");

    const json& layers = field(j, "layers");
    if (!layers.is_array() || layers.empty()) throw InputError("circuit: expected a non-empty layer list");
    for (const auto& lj : layers) {
        std::vector<HermitianOperator> gens;
        std::vector<double> thetas;
        if (lj.contains("generators")) {
            gens = operator_list(lj["generators"], "generators");
            const json& tj = field(lj, "thetas");
            if (!tj.is_array()) throw InputError("circuit: thetas must be an array");
            for (const auto& t : tj) thetas.push_back(real_of(t, "theta"));
        } else {
            gens.push_back(hermitian_from_json(field(lj, "generator")));
            thetas.push_back(lj.contains("theta") ? real_of(lj["theta"], "theta") : 0.0);
        }
        spec.layers.push_back(CircuitLayer{std::move(gens), std::move(thetas), channel_from_json(field(lj, "noise"))});
    }
    spec.observable = hermitian_from_json(field(j, "observable"));
    if (j.contains("initial")) {
        spec.initial = state_from_json(j["initial"]);
    } else {
        spec.initial = QuantumState::basis(spec.dim_R * ds, 0);
    }
    spec.validate();
    return spec;
}

json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    double r = std::strtod(buf, nullptr);
    if (r == 0.0) r = 0.0;  // drop negative zero
    return r;
}

json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(json::array({number(m(r, c).real()), number(m(r, c).imag())}));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const CoefficientReport& r) {
    json j;
    j["name"] = r.name;
    j["value"] = number(r.value);
    j["status"] = status_name(r.status);
    j["gap"] = number(r.gap);
    j["iterations"] = r.iterations;
    j["witness_verified"] = r.witness_verified;
    if (r.analytic_value) j["analytic_value"] = number(*r.analytic_value);
    if (r.analytic_agreement) j["analytic_agreement"] = number(*r.analytic_agreement);
    if (r.primal_witness) j["primal_witness"] = matrix_to_json(r.primal_witness->mat());
    json dual = json::array();
    for (const auto& y : r.dual_witness) dual.push_back(matrix_to_json(y.mat()));
    j["dual_witness"] = std::move(dual);
    return j;
}

json to_json(const ContractionBoundReport& r) {
    json j;
    j["tr_upper_from_alpha"] = number(r.tr_upper_from_alpha);
    j["tr_upper_from_cone"] = number(r.tr_upper_from_cone);
    j["cone_used"] = to_string(r.cone_used);
    j["hs_upper_from_alpha_plus"] = number(r.hs_upper_from_alpha_plus);
    if (r.expansion_lower) j["expansion_lower"] = number(*r.expansion_lower);
    if (r.qubit_exact) {
        j["qubit_exact"] = json{{"eta_tr", number(r.qubit_exact->eta_tr)},
                                {"expansion", number(r.qubit_exact->expansion)}};
    }
    return j;
}

json to_json(const BoundReport& r) {
    json j;
    j["bound_name"] = r.bound_name;
    json in = json::object();
    for (const auto& [k, v] : r.inputs) in[k] = number(v);
    j["inputs"] = std::move(in);
    j["value"] = number(r.value);
    j["infinite"] = r.infinite || std::isinf(r.value);
    j["degenerate_flag"] = r.degenerate_flag ? json(*r.degenerate_flag) : json(nullptr);
    if (!r.extra.empty()) {
        json ex = json::object();
        for (const auto& [k, v] : r.extra) ex[k] = number(v);
        j["extra"] = std::move(ex);
    }
    if (r.empirical) {
        j["empirical"] = json{{"measured", number(r.empirical->measured)},
                              {"respected", r.empirical->respected},
                              {"slack", number(r.empirical->slack)}};
    }
    return j;
}

json to_json(const ExclusionResult& r) {
    json j;
    j["value"] = number(r.value);
    j["status"] = status_name(r.status);
    json povm = json::array();
    for (const auto& e : r.povm) povm.push_back(matrix_to_json(e.mat()));
    j["povm"] = std::move(povm);
    return j;
}

std::string dump(const json& j) { return j.dump(); }

}  // namespace doeblin::io
