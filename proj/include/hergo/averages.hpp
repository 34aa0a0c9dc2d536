#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hergo/hardy.hpp"
#include "hergo/systems.hpp"

namespace hergo {

struct SchemeDomain : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// floor(a(n)) for n = 1..N; ok[n-1] = 0 marks an ambiguous floor
struct FloorTable {
    std::vector<int64_t> floors;
    std::vector<uint8_t> ok;
    FloorStats stats;
    bool identity = false;  // floor(a(n)) = n for every n, all certified
    int64_t at(int64_t n) const { return floors[n - 1]; }
};
FloorTable tabulate(const HardyExpr& a, int64_t N);

// One factor T^{v(n)} f of a multiple average, v(n)_m = sum of sign * floor(a_seq(n)) over
// the terms (m, seq, sign).
struct AverageTerm {
    int transformation;
    int sequence;
    int sign = 1;
};
struct AverageFactor {
    Observable f;
    std::vector<AverageTerm> terms;
};

struct AverageResult {
    Observable value;   // empty Observable when only Monte Carlo was possible
    int64_t used = 0;   // n in [N] with all floors certified
    int64_t skipped = 0;
};

class AverageEngine {
public:
    AverageEngine(System sys, std::vector<HardyExpr> seqs, std::vector<AverageFactor> factors);

    const System& system() const { return sys_; }
    // E_{n in [N]} prod_r T^{v_r(n)} f_r, exact coefficient-merged
    AverageResult average(int64_t N);
    // ||average - c||_2; on FrequencyOverflow falls back to Monte Carlo when allowed
    struct Residual {
        double value = 0;
        double skip_fraction = 0;
        bool monte_carlo = false;
        double mc_error = 0;
    };
    Residual residual(int64_t N, cplx target, int64_t mc_samples = 0, uint64_t seed = 1);
    // ||average - c||_2 by sampling exact dyadic points (automorphism systems)
    Residual monte_carlo_residual(int64_t N, cplx target, int64_t samples, uint64_t seed);

private:
    System sys_;
    std::vector<HardyExpr> seqs_;
    std::vector<AverageFactor> factors_;
    std::vector<FloorTable> tables_;
    int64_t tabulated_ = 0;

    void ensure(int64_t N);
    std::vector<int64_t> exponent(const AverageFactor& fac, int64_t n) const;
    AverageResult rotation_average(int64_t N);
    AverageResult finite_average(int64_t N);
    AverageResult automorphism_average(int64_t N);
};

Observable multi_average(const System& sys, const std::vector<HardyExpr>& a, const std::vector<Observable>& f,
                         int64_t N);

struct AverageReport {
    std::string kind;    // joint | difference | product | single
    std::string scheme = "Cesaro";
    std::vector<int64_t> N_grid;
    std::vector<double> residuals;
    std::vector<double> skip_fractions;
    std::vector<bool> monte_carlo;
    std::vector<double> mc_errors;
    double skip_fraction = 0;  // max over the grid
    bool tail_monotone = true;
    double wall_time = 0;

    double final_residual() const { return residuals.empty() ? 0.0 : residuals.back(); }
    bool passes(double eps) const { return !residuals.empty() && residuals.back() <= eps; }
};

struct ReportOptions {
    std::vector<int64_t> N_grid{1000, 10000, 100000, 1000000};
    int64_t mc_samples = 1 << 12;
    uint64_t seed = 1;
};

AverageReport run_report(AverageEngine& eng, cplx target, const std::string& kind, const ReportOptions& opt);

AverageReport joint_ergodicity_report(const System& sys, const std::vector<HardyExpr>& a,
                                      const std::vector<Observable>& f, const ReportOptions& opt = {});
// E_n T_i^{floor a_i(n)} T_j^{-floor a_j(n)} f against int f
AverageReport difference_ergodicity_report(const System& sys, const std::vector<HardyExpr>& a, int i, int j,
                                           const Observable& f, const ReportOptions& opt = {});
// joint average of f_1 (x) ... (x) f_l on the product system
AverageReport product_ergodicity_report(const System& sys, const std::vector<HardyExpr>& a,
                                        const std::vector<Observable>& f, const ReportOptions& opt = {});
// E_n T_j^{floor a(n)} f against int f
AverageReport single_ergodicity_report(const System& sys, int j, const HardyExpr& a, const Observable& f,
                                       const ReportOptions& opt = {});

// <g, average - target> over a fixed set of 8 low-frequency test observables
std::vector<cplx> weak_residuals(const Observable& average, cplx target);

// ---- averaging schemes on scalar sequences ----

struct Scheme {
    enum class Kind { Cesaro, Weighted };
    Kind kind = Kind::Cesaro;
    std::string weight_name = "id";
    std::function<double(int64_t)> W;  // Weighted: nondecreasing, W -> infinity

    static Scheme cesaro();
    static Scheme logarithmic();                   // W(n) = log n
    static Scheme weighted(std::string name, std::function<double(int64_t)> W);
};

// v[n-1] = v_n.  A^W_N = (1/W(N)) sum_{n<=N} (W(n+1) - W(n)) v_n; Cesaro is W(n) = n.
cplx scheme_average(const std::vector<cplx>& v, const Scheme& scheme, int64_t N);

// E_{n in (lo, hi]} v_n
cplx interval_average(const std::vector<cplx>& v, int64_t lo, int64_t hi);

struct DyadicReport {
    std::vector<int64_t> points;  // a_K with a_{K+1} <= |v|
    std::vector<double> dyadic_err;   // |E_{(a_K, a_{K+1}]} v - L|
    std::vector<double> cesaro_err;   // max(|C_{a_K} - L|, |C_{a_{K+1}} - L|)
    double worst_ratio = 0;           // max over the last intervals of dyadic_err / cesaro_err
    bool within(double factor) const { return worst_ratio <= factor; }
};
// a_N from a spec: "2^N" or "floor(c^N)" with c given as a decimal string
std::vector<int64_t> dyadic_points(const std::string& spec, int64_t max_n);
DyadicReport dyadic_check(const std::vector<cplx>& v, cplx limit, const std::vector<int64_t>& points,
                          int tail = 3);

}  // namespace hergo
