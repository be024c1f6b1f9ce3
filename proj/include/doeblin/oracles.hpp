#pragma once

#include <cstdint>
#include <vector>

#include "doeblin/channels.hpp"
#include "doeblin/sdp.hpp"

namespace doeblin {

struct Ensemble {
    std::vector<double> priors;
    std::vector<QuantumState> states;

    void validate() const;
    static Ensemble uniform(std::vector<QuantumState> states);
};

struct ExclusionResult {
    double value = 0.0;
    std::vector<HermitianOperator> povm;
    SolveStatus status = SolveStatus::NumericalLimit;
};

// min over POVMs of sum_x p(x) Tr[Lambda_x rho_x]
ExclusionResult exclusion(const Ensemble& e, const SdpOptions& opts = {});
double exclusion_error(const Ensemble& e, const SdpOptions& opts = {});

// Lower bound on the trace-distance contraction coefficient by search over orthogonal pure pairs.
double eta_tr_estimate(const Channel& ch, int restarts, std::uint64_t seed, int max_evals = 200);

struct SeesawResult {
    double value = 1.0;
    std::vector<double> history;  // best restart, one entry per round
};

// Upper estimate of the induced Doeblin coefficient by alternating minimization.
SeesawResult alpha_I_seesaw_detailed(const Channel& ch, int restarts, std::uint64_t seed);
double alpha_I_seesaw(const Channel& ch, int restarts, std::uint64_t seed);

}  // namespace doeblin
