// SPDX-License-Identifier: Apache-2.0
//
// cdmagame: equilibrium power allocation for large uplink CDMA systems
// ------------------------------------------------------------------------

#include "cdmagame/experiments.hpp"
#include "cdmagame/channel.hpp"
#include "cdmagame/errors.hpp"
#include "cdmagame/game.hpp"
#include "cdmagame/properties.hpp"
#include "cdmagame/receivers.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace cdmagame {

namespace {

using Records = std::vector<ExperimentRecord>;

// substream ids inside a (trial, L) stream
constexpr std::uint64_t kChannelStream = 0;
constexpr std::uint64_t kSpreadingStream = 1;
constexpr std::uint64_t kOrderingStream = 2;

struct Context {
    const ExperimentConfig &cfg;
    UtilityFunction u;
    double betaStar;
    int K;
    std::vector<int> Ls;
    RandomStream root;
};

std::vector<MultipathChannel> draw_channels(int K, int L, const RandomStream &rng) {
    std::vector<MultipathChannel> chans;
    chans.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        auto r = rng.substream(static_cast<std::uint64_t>(k));
        chans.push_back(sample_multipath(static_cast<std::size_t>(L), 1.0, r));
    }
    return chans;
}

Eigen::VectorXd energies_of(const std::vector<MultipathChannel> &chans) {
    Eigen::VectorXd e(static_cast<Eigen::Index>(chans.size()));
    for (std::size_t k = 0; k < chans.size(); ++k)
        e[static_cast<Eigen::Index>(k)] = total_energy(chans[k]);
    return e;
}

DecodingOrder make_order(const Eigen::VectorXd &energies, Ordering ordering, RandomStream rng) {
    const auto K = static_cast<std::size_t>(energies.size());
    switch (ordering) {
    case Ordering::Decreasing:
        return rank_by_energy(energies, EnergyDirection::Decreasing);
    case Ordering::Increasing:
        return rank_by_energy(energies, EnergyDirection::Increasing);
    case Ordering::Random:
        break;
    }
    // the arbitrator's signal: uniform over K! when it fits, a 64-bit seed otherwise
    if (K <= 20) {
        std::uint64_t f = 1;
        for (std::size_t i = 2; i <= K; ++i)
            f *= i;
        return decode_permutation(rng.below(f), K);
    }
    return decode_permutation(rng.next_u64(), K);
}

// Orderings compared by the SIC experiments: always random and decreasing, plus
// increasing when asked for.
std::vector<Ordering> compared_orderings(const ExperimentConfig &cfg) {
    std::vector<Ordering> o = {Ordering::Random, Ordering::Decreasing};
    if (cfg.ordering == Ordering::Increasing)
        o.push_back(Ordering::Increasing);
    return o;
}

ExperimentRecord base_record(const ExperimentConfig &cfg, std::optional<long long> trial, int L, double alpha,
                             FilterKind filter, std::string ordering = {}) {
    ExperimentRecord r;
    r.experiment = cfg.experiment;
    r.trial = trial;
    r.L = L;
    r.alpha = alpha;
    r.filter = to_string(filter);
    r.ordering = std::move(ordering);
    return r;
}

void emit_users(Records &out, const ExperimentRecord &proto, const Eigen::VectorXd &powers, const Eigen::VectorXd &sinr,
                const Eigen::VectorXd &util, const std::optional<DecodingOrder> &order, const std::string &userFlag,
                const std::string &aggregateFlag) {
    for (Eigen::Index k = 0; k < powers.size(); ++k) {
        auto r = proto;
        r.user = k;
        if (order)
            r.rank = order->ranks[static_cast<std::size_t>(k)];
        r.power = powers[k];
        r.sinr = sinr[k];
        r.utility = util[k];
        r.flag = userFlag;
        out.push_back(std::move(r));
    }
    auto a = proto;
    a.power = powers.mean();
    a.sinr = sinr.mean();
    a.utility = util.mean();
    a.flag = aggregateFlag;
    out.push_back(std::move(a));
}

Eigen::VectorXd utilities(const Context &ctx, const Eigen::VectorXd &sinr, const Eigen::VectorXd &powers) {
    Eigen::VectorXd u(sinr.size());
    for (Eigen::Index k = 0; k < sinr.size(); ++k)
        u[k] = utility(sinr[k], powers[k], ctx.u);
    return u;
}

Eigen::VectorXd mmse_exact_all(const SystemRealization &sys, const std::optional<DecodingOrder> &order) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(sys.K));
    for (std::size_t k = 0; k < sys.K; ++k) {
        const auto set = order ? InterferenceSet::decoded_after(k, order->ranks) : InterferenceSet::all_but(k, sys.K);
        out[static_cast<Eigen::Index>(k)] = sinr_mmse_exact(sys, k, set);
    }
    return out;
}

ExperimentRecord flagged(ExperimentRecord r, const char *flag) {
    r.flag = flag;
    return r;
}

// ---------------------------------------------------------------- theory-vs-sim

void theory_vs_sim_trial(const Context &ctx, int t, Records &out) {
    const auto &cfg = ctx.cfg;
    const auto trialRng = ctx.root.substream(static_cast<std::uint64_t>(t));
    const double alpha = static_cast<double>(ctx.K) / cfg.N;
    for (int L : ctx.Ls) {
        const auto rng = trialRng.substream(static_cast<std::uint64_t>(L));
        auto chans = draw_channels(ctx.K, L, rng.substream(kChannelStream));
        const Eigen::VectorXd energies = energies_of(chans);
        auto spread = rng.substream(kSpreadingStream);
        const auto base = build_realization(std::move(chans), Eigen::VectorXd::Ones(ctx.K),
                                            static_cast<std::size_t>(cfg.N), cfg.sigma2, spread);
        for (auto filter : cfg.filters) {
            std::optional<DecodingOrder> order;
            const std::string ordName = is_sic(filter) ? to_string(cfg.ordering) : "";
            auto proto = base_record(cfg, t, L, alpha, filter, ordName);
            PowerAllocation pa;
            double target = ctx.betaStar;
            try {
                if (is_sic(filter)) {
                    order = make_order(energies, cfg.ordering, rng.substream(kOrderingStream));
                    pa = sic_allocation(energies, *order, filter, ctx.betaStar, cfg.sigma2, cfg.N);
                } else {
                    pa = pa_equilibrium(energies, filter, ctx.betaStar, alpha, cfg.sigma2);
                    if (pa.target.betaPlus)
                        target = *pa.target.betaPlus;
                }
            } catch (const InfeasibleLoad &) {
                out.push_back(flagged(proto, "infeasible"));
                continue;
            }
            const auto sys = base.with_powers(pa.powers);
            Eigen::VectorXd sinr;
            Eigen::VectorXd util;
            switch (filter) {
            case FilterKind::MF:
                sinr = sinr_mf_all(sys, InterferenceRule::full());
                break;
            case FilterKind::MF_SIC:
                sinr = sinr_mf_all(sys, InterferenceRule::sic(order->ranks));
                break;
            default:
                sinr = mmse_exact_all(sys, order);
                break;
            }
            if (filter == FilterKind::OPT) {
                // every user is credited with the SINR whose rate equals its share of the sum capacity
                const double betaEq = std::exp2(capacity_finite(sys) / alpha) - 1.0;
                util = utilities(ctx, Eigen::VectorXd::Constant(ctx.K, betaEq), pa.powers);
            } else {
                util = utilities(ctx, sinr, pa.powers);
            }
            emit_users(out, proto, pa.powers, sinr, util, order, "", "aggregate");

            auto theory = proto;
            theory.power = pa.powers.mean();
            theory.sinr = target;
            theory.utility = ctx.u.gamma(ctx.betaStar) * pa.powers.cwiseInverse().mean();
            theory.flag = "theory";
            out.push_back(std::move(theory));
        }
    }
}

// ---------------------------------------------------------------- utility-vs-L

bool supports_uniform_comparison(FilterKind f) { return f == FilterKind::MF || f == FilterKind::MMSE; }

void utility_vs_L_setup(const Context &ctx, Records &out) {
    const double alpha = static_cast<double>(ctx.K) / ctx.cfg.N;
    for (int L : ctx.Ls)
        for (auto filter : ctx.cfg.filters)
            if (!supports_uniform_comparison(filter))
                out.push_back(flagged(base_record(ctx.cfg, std::nullopt, L, alpha, filter), "unsupported"));
}

void utility_vs_L_trial(const Context &ctx, int t, Records &out) {
    const auto &cfg = ctx.cfg;
    const auto trialRng = ctx.root.substream(static_cast<std::uint64_t>(t));
    const double alpha = static_cast<double>(ctx.K) / cfg.N;
    for (int L : ctx.Ls) {
        const auto rng = trialRng.substream(static_cast<std::uint64_t>(L));
        auto chans = draw_channels(ctx.K, L, rng.substream(kChannelStream));
        const Eigen::VectorXd energies = energies_of(chans);
        auto spread = rng.substream(kSpreadingStream);
        const auto base = build_realization(std::move(chans), Eigen::VectorXd::Ones(ctx.K),
                                            static_cast<std::size_t>(cfg.N), cfg.sigma2, spread);
        for (auto filter : cfg.filters) {
            if (!supports_uniform_comparison(filter))
                continue;
            const auto proto = base_record(cfg, t, L, alpha, filter);
            PowerAllocation pa;
            try {
                pa = pa_equilibrium(energies, filter, ctx.betaStar, alpha, cfg.sigma2);
            } catch (const InfeasibleLoad &) {
                out.push_back(flagged(proto, "infeasible"));
                continue;
            }
            auto sinr_of = [&](const SystemRealization &sys) -> Eigen::VectorXd {
                if (filter == FilterKind::MF)
                    return sinr_mf_all(sys, InterferenceRule::full());
                return sinr_mmse_approx(sys, InterferenceRule::full());
            };
            const Eigen::VectorXd nashSinr = sinr_of(base.with_powers(pa.powers));
            emit_users(out, proto, pa.powers, nashSinr, utilities(ctx, nashSinr, pa.powers), std::nullopt, "",
                       "aggregate");

            // same total power spread evenly
            const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(ctx.K, pa.powers.mean());
            const Eigen::VectorXd uniSinr = sinr_of(base.with_powers(uniform));
            emit_users(out, proto, uniform, uniSinr, utilities(ctx, uniSinr, uniform), std::nullopt, "uniform",
                       "uniform-aggregate");
        }
    }
}

// ------------------------------------------------------- inverse-power-vs-alpha

int users_for_load(double alpha, int N) { return std::max(1, static_cast<int>(std::lround(alpha * N))); }

void inverse_power_setup(const Context &ctx, Records &out) {
    const auto &cfg = ctx.cfg;
    const auto gammaStar = ctx.u.gamma(ctx.betaStar);
    for (int L : ctx.Ls) {
        for (double a : cfg.resolved_alpha_sweep()) {
            const int K = users_for_load(a, cfg.N);
            const double alpha = static_cast<double>(K) / cfg.N;
            for (auto filter : cfg.filters) {
                // every channel at its mean energy
                auto r = base_record(cfg, std::nullopt, L, alpha, filter);
                Eigen::VectorXd p;
                try {
                    if (is_sic(filter))
                        p = pa_sic_closed(Eigen::VectorXd::Ones(K), filter, ctx.betaStar, cfg.sigma2, cfg.N).powers;
                    else
                        p = pa_equilibrium(Eigen::VectorXd::Ones(K), filter, ctx.betaStar, alpha, cfg.sigma2).powers;
                } catch (const InfeasibleLoad &) {
                    out.push_back(flagged(r, "infeasible"));
                    continue;
                }
                r.power = p.mean();
                r.sinr = ctx.betaStar;
                r.utility = gammaStar * p.cwiseInverse().mean();
                r.flag = "theory";
                out.push_back(std::move(r));
            }
        }
    }
}

void inverse_power_trial(const Context &ctx, int t, Records &out) {
    const auto &cfg = ctx.cfg;
    const auto trialRng = ctx.root.substream(static_cast<std::uint64_t>(t));
    const auto sweep = cfg.resolved_alpha_sweep();
    const auto gammaStar = ctx.u.gamma(ctx.betaStar);
    for (int L : ctx.Ls) {
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            const int K = users_for_load(sweep[i], cfg.N);
            const double alpha = static_cast<double>(K) / cfg.N;
            const auto rng = trialRng.substream(static_cast<std::uint64_t>(L)).substream(std::bit_cast<std::uint64_t>(alpha));
            const Eigen::VectorXd energies = energies_of(draw_channels(K, L, rng.substream(kChannelStream)));
            for (auto filter : cfg.filters) {
                auto emit = [&](const PowerAllocation &pa, const std::optional<DecodingOrder> &order,
                                const std::string &ordName) {
                    const Eigen::VectorXd target = Eigen::VectorXd::Constant(K, ctx.betaStar);
                    const Eigen::VectorXd util = gammaStar * pa.powers.cwiseInverse();
                    emit_users(out, base_record(cfg, t, L, alpha, filter, ordName), pa.powers, target, util, order,
                               "", "aggregate");
                };
                if (!is_sic(filter)) {
                    try {
                        emit(pa_equilibrium(energies, filter, ctx.betaStar, alpha, cfg.sigma2), std::nullopt, "");
                    } catch (const InfeasibleLoad &) {
                        out.push_back(flagged(base_record(cfg, t, L, alpha, filter), "infeasible"));
                    }
                    continue;
                }
                for (auto ordering : compared_orderings(cfg)) {
                    const auto order = make_order(energies, ordering, rng.substream(kOrderingStream));
                    emit(sic_allocation(energies, order, filter, ctx.betaStar, cfg.sigma2, cfg.N), order,
                         to_string(ordering));
                }
            }
        }
    }
}

// ---------------------------------------------------------- ordering-gain-vs-L

void ordering_gain_setup(const Context &ctx, Records &out) {
    const double alpha = static_cast<double>(ctx.K) / ctx.cfg.N;
    for (int L : ctx.Ls)
        for (auto filter : ctx.cfg.filters)
            if (!is_sic(filter))
                out.push_back(flagged(base_record(ctx.cfg, std::nullopt, L, alpha, filter), "unsupported"));
}

void ordering_gain_trial(const Context &ctx, int t, Records &out) {
    const auto &cfg = ctx.cfg;
    const auto trialRng = ctx.root.substream(static_cast<std::uint64_t>(t));
    const double alpha = static_cast<double>(ctx.K) / cfg.N;
    for (int L : ctx.Ls) {
        const auto rng = trialRng.substream(static_cast<std::uint64_t>(L));
        auto chans = draw_channels(ctx.K, L, rng.substream(kChannelStream));
        const Eigen::VectorXd energies = energies_of(chans);
        auto spread = rng.substream(kSpreadingStream);
        const auto base = build_realization(std::move(chans), Eigen::VectorXd::Ones(ctx.K),
                                            static_cast<std::size_t>(cfg.N), cfg.sigma2, spread);
        for (auto filter : cfg.filters) {
            if (!is_sic(filter))
                continue;
            for (auto ordering : compared_orderings(cfg)) {
                const auto order = make_order(energies, ordering, rng.substream(kOrderingStream));
                const auto pa = sic_allocation(energies, order, filter, ctx.betaStar, cfg.sigma2, cfg.N);
                const auto sys = base.with_powers(pa.powers);
                const auto rule = InterferenceRule::sic(order.ranks);
                const Eigen::VectorXd sinr =
                    filter == FilterKind::MF_SIC ? sinr_mf_all(sys, rule) : sinr_mmse_approx(sys, rule);
                emit_users(out, base_record(cfg, t, L, alpha, filter, to_string(ordering)), pa.powers, sinr,
                           utilities(ctx, sinr, pa.powers), order, "", "aggregate");
            }
        }
    }
}

// --------------------------------------------------------------- property-suite

ExperimentRecord property(const ExperimentConfig &cfg, const std::string &name, std::optional<double> measured,
                          std::optional<double> reference, double tolerance, bool pass) {
    ExperimentRecord r;
    r.experiment = cfg.experiment;
    r.filter = name;
    r.power = measured;
    r.sinr = reference;
    r.utility = tolerance;
    r.flag = pass ? "pass" : "fail";
    return r;
}

void property_suite(const Context &ctx, Records &out) {
    const auto &cfg = ctx.cfg;
    const int L = ctx.Ls.front();

    for (auto filter : {FilterKind::MF, FilterKind::MMSE}) {
        const auto s = deviation_scaling(filter, {64, 128, 256}, 0.125, L, cfg.trials, cfg.seed, ctx.betaStar);
        for (std::size_t i = 0; i < s.ratios.size(); ++i) {
            const double r = s.ratios[i];
            out.push_back(property(cfg, "deviation-scaling-" + to_string(filter) + "-N" + std::to_string(s.N[i + 1]), r,
                                   0.5, 0.2, r >= 0.3 && r <= 0.7));
        }
    }

    for (int l : {2, 4, 8}) {
        const double dev = normalized_gain_deviation(l, 128, 64, 10000, cfg.seed + static_cast<std::uint64_t>(l));
        out.push_back(property(cfg, "normalized-gain-mean-L" + std::to_string(l), dev, 0.0, 1e-2, dev <= 1e-2));
    }

    for (const auto &[name, profile] : reference_profiles(cfg.seed)) {
        const auto c = capacity_triple(profile);
        const double d3 = std::abs(c.integral - c.mmseIdentity) / c.integral;
        const double d4 = std::abs(c.integral - c.sic) / c.integral;
        out.push_back(property(cfg, "mmse-identity-" + name, d3, 0.0, 1e-3, d3 < 1e-3));
        out.push_back(property(cfg, "sic-identity-" + name, d4, 0.0, 1e-3, d4 < 1e-3));
    }

    const double gap = sic_recursion_gap(100, cfg.seed, ctx.betaStar);
    out.push_back(property(cfg, "sic-recursion", gap, 0.0, 1e-12, gap <= 1e-12));

    const auto search = ordering_search(6, 100, cfg.seed, ctx.betaStar, 8);
    const double fMin = static_cast<double>(search.decreasingMinimisesPower) / search.cases;
    const double fInv = static_cast<double>(search.decreasingMaximisesInversePower) / search.cases;
    out.push_back(property(cfg, "ordering-min-total-power", fMin, 1.0, 0.0, fMin == 1.0));
    out.push_back(property(cfg, "ordering-max-inverse-power", fInv, 1.0, 0.0, fInv == 1.0));

    try {
        const double a = solve_alpha_crossover(ctx.betaStar);
        out.push_back(property(cfg, "alpha-crossover", a, 0.12, 0.01, std::abs(a - 0.12) <= 0.01));
    } catch (const NoSolutionInBracket &) {
        out.push_back(property(cfg, "alpha-crossover", std::nullopt, 0.12, 0.01, false));
    }
}

} // namespace

void parallel_for(int count, int workers, const std::function<void(int)> &body) {
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failureMutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failureMutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto &th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig &cfg) {
    cfg.validate();
    Context ctx{cfg, goodput(cfg.M), 0.0, cfg.resolved_K(), cfg.resolved_L(), RandomStream(cfg.seed)};
    ctx.betaStar = solve_beta_star(ctx.u).betaStar;

    Records out;
    if (cfg.experiment == "property-suite") {
        property_suite(ctx, out);
        return out;
    }

    void (*trial)(const Context &, int, Records &) = nullptr;
    if (cfg.experiment == "theory-vs-sim") {
        trial = theory_vs_sim_trial;
    } else if (cfg.experiment == "utility-vs-L") {
        utility_vs_L_setup(ctx, out);
        trial = utility_vs_L_trial;
    } else if (cfg.experiment == "inverse-power-vs-alpha") {
        inverse_power_setup(ctx, out);
        trial = inverse_power_trial;
    } else if (cfg.experiment == "ordering-gain-vs-L") {
        ordering_gain_setup(ctx, out);
        trial = ordering_gain_trial;
    } else {
        throw UsageError("unknown experiment '" + cfg.experiment + "'");
    }

    std::vector<Records> perTrial(static_cast<std::size_t>(cfg.trials));
    parallel_for(cfg.trials, cfg.resolved_workers(),
                 [&](int t) { trial(ctx, t, perTrial[static_cast<std::size_t>(t)]); });
    for (auto &r : perTrial)
        out.insert(out.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
    return out;
}

double alpha_crossover_equation(double alpha, double betaStar) {
    const double c = betaStar / (1.0 + betaStar);
    const double bp = solve_beta_plus(betaStar, alpha);
    return alpha * betaStar * c * (1.0 - alpha * bp / (1.0 + bp)) - bp * (-std::expm1(-alpha * c));
}

double solve_alpha_crossover(double betaStar) {
    if (!(betaStar > 0.0))
        throw InvalidParameter("solve_alpha_crossover: betaStar must be positive");
    constexpr int kGrid = 200;
    double lo = 0.0, flo = 0.0;
    for (int i = 1; i < kGrid; ++i) {
        const double a = static_cast<double>(i) / kGrid;
        const double fa = alpha_crossover_equation(a, betaStar);
        if (fa == 0.0)
            return a;
        if (i > 1 && (fa > 0.0) != (flo > 0.0)) {
            double hi = a;
            const bool rising = fa > 0.0;
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                ((alpha_crossover_equation(mid, betaStar) > 0.0) == rising ? hi : lo) = mid;
            }
            return 0.5 * (lo + hi);
        }
        lo = a;
        flo = fa;
    }
    throw NoSolutionInBracket("solve_alpha_crossover: equation keeps the sign of " +
                              std::string(flo > 0.0 ? "+" : "-") + " on (0, 1) for betaStar=" +
                              std::to_string(betaStar));
}

} // namespace cdmagame
