#include "pnsim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "pnsim/csv.hpp"
#include "pnsim/pipeline.hpp"

namespace pnsim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Mean SE over UEs for every symbol, then the per-block SE, from one set of accumulators.
struct GeometryStats {
    std::vector<double> value;  // tau_c per-symbol entries followed by the block entry
    std::vector<long long> invalid;
};

GeometryStats evaluate(const std::vector<SinrAccumulator>& acc, int tau_c, int K, const VectorXd& power,
                       double noise_power) {
    GeometryStats st{std::vector<double>(tau_c + 1, 0.0), std::vector<long long>(tau_c + 1, 0)};
    std::vector<double> count(tau_c + 1, 0.0);
    std::vector<double> sinr(tau_c);
    for (int k = 0; k < K; ++k) {
        bool all_valid = true;
        for (int tau = 0; tau < tau_c; ++tau) {
            const SinrValue s = finalize_sinr(acc[tau * K + k], power(k), noise_power);
            sinr[tau] = s.sinr;
            if (!s.valid) {
                ++st.invalid[tau];
                all_valid = false;
                continue;
            }
            st.value[tau] += se_of(s.sinr);
            count[tau] += 1.0;
        }
        if (all_valid) {
            st.value[tau_c] += se_per_block(sinr);
            count[tau_c] += 1.0;
        } else {
            ++st.invalid[tau_c];
        }
    }
    for (int i = 0; i <= tau_c; ++i) st.value[i] = count[i] > 0 ? st.value[i] / count[i] : kNaN;
    return st;
}

struct Aggregate {
    std::vector<double> sum;
    std::vector<double> var_sum;
    std::vector<int> used;
    std::vector<long long> invalid;

    explicit Aggregate(int n) : sum(n, 0.0), var_sum(n, 0.0), used(n, 0), invalid(n, 0) {}
};

std::vector<TrialOutcome> run_trials(const PassContext& pass, const GeometryContext& geom, int threads) {
    const int n = pass.cfg.n_trials;
    std::vector<TrialOutcome> out(n);
    auto work = [&](int first, int step) {
        for (int t = first; t < n; t += step) out[t] = evaluate_trial(pass, geom, draw_trial(pass, geom, t));
    };
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        work(0, 1);
        return out;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            try {
                work(w, threads);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

void run_pass(const PassContext& pass, const RunOptions& opts, ExperimentResult& result) {
    const auto& cfg = pass.cfg;
    const int K = cfg.layout.num_ues;
    const int tau_c = cfg.layout.block_symbols;
    const int V = pass.num_variants();
    const int T = cfg.n_trials;
    std::vector<Aggregate> agg(V, Aggregate(tau_c + 1));

    for (int g = 0; g < cfg.n_geometries; ++g) {
        const auto start = std::chrono::steady_clock::now();
        const GeometryContext geom = make_geometry(pass, g);
        const auto outcomes = run_trials(pass, geom, opts.threads);
        for (const auto& o : outcomes) result.pseudo_inverse_fallbacks += o.pseudo_inverse_fallbacks;

        for (int v = 0; v < V; ++v) {
            std::vector<SinrAccumulator> acc(static_cast<std::size_t>(tau_c) * K);
            for (const auto& o : outcomes)
                for (int tau = 0; tau < tau_c; ++tau)
                    for (int k = 0; k < K; ++k) acc[tau * K + k].add(o.terms[term_index(v, tau, k, tau_c, K)]);
            const GeometryStats full = evaluate(acc, tau_c, K, geom.net.power, geom.net.noise_power);

            // Delete-one jackknife over trials.
            std::vector<std::vector<double>> loo(T);
            for (int t = 0; t < T && T > 1; ++t) {
                for (int tau = 0; tau < tau_c; ++tau)
                    for (int k = 0; k < K; ++k)
                        acc[tau * K + k].remove(outcomes[t].terms[term_index(v, tau, k, tau_c, K)]);
                loo[t] = evaluate(acc, tau_c, K, geom.net.power, geom.net.noise_power).value;
                for (int tau = 0; tau < tau_c; ++tau)
                    for (int k = 0; k < K; ++k)
                        acc[tau * K + k].add(outcomes[t].terms[term_index(v, tau, k, tau_c, K)]);
            }

            auto& a = agg[v];
            for (int i = 0; i <= tau_c; ++i) {
                a.invalid[i] += full.invalid[i];
                if (std::isnan(full.value[i])) continue;
                double var = kNaN;
                if (T > 1) {
                    double mean = 0.0;
                    for (int t = 0; t < T; ++t) mean += loo[t][i];
                    mean /= T;
                    double ss = 0.0;
                    for (int t = 0; t < T; ++t) ss += (loo[t][i] - mean) * (loo[t][i] - mean);
                    var = ss * (T - 1) / T;
                }
                a.sum[i] += full.value[i];
                a.var_sum[i] += var;
                ++a.used[i];
            }
        }
        result.sinr_evaluations += static_cast<long long>(V) * tau_c * K;

        if (opts.progress) {
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            *opts.progress << '[' << cfg.experiment << " pn=" << (pass.phase_noise ? "on" : "off") << " K=" << K
                           << "] geometry " << g + 1 << '/' << cfg.n_geometries << " in " << secs << " s\n"
                           << std::flush;
        }
    }

    const int n_schemes = static_cast<int>(cfg.schemes.size());
    for (int v = 0; v < V; ++v) {
        const auto& a = agg[v];
        for (int tau = 0; tau < tau_c; ++tau) result.invalid_sinr += a.invalid[tau];
        auto make = [&](int channel_use, int tau, int i) {
            ResultRecord r;
            r.experiment = cfg.experiment;
            r.scheme = to_string(cfg.schemes[v % n_schemes]);
            r.estimator = to_string(pass.estimators[v / n_schemes]);
            r.phase_noise = pass.phase_noise;
            r.num_ues = K;
            r.num_aps = cfg.layout.num_aps;
            r.channel_use = channel_use;
            r.tau = tau;
            r.se_per_ue = a.used[i] > 0 ? a.sum[i] / a.used[i] : kNaN;
            r.n_geometries = cfg.n_geometries;
            r.n_trials = T;
            r.standard_error = a.used[i] > 0 ? std::sqrt(a.var_sum[i]) / a.used[i] : kNaN;
            r.invalid = a.invalid[i];
            r.master_seed = cfg.master_seed;
            return r;
        };
        const int n_c = cfg.layout.block_subcarriers;
        for (int tau = 0; tau < tau_c; ++tau)
            for (int c = tau * n_c + 1; c <= (tau + 1) * n_c; ++c) {
                if (!cfg.channel_uses.empty() &&
                    std::find(cfg.channel_uses.begin(), cfg.channel_uses.end(), c) == cfg.channel_uses.end())
                    continue;
                result.records.push_back(make(c, tau + 1, tau));
            }
        result.records.push_back(make(0, 0, tau_c));
    }
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    ExperimentResult result;
    const std::vector<int> ue_counts = cfg.ue_counts.empty() ? std::vector<int>{cfg.layout.num_ues} : cfg.ue_counts;
    for (int K : ue_counts) {
        ExperimentConfig c = cfg;
        c.layout.num_ues = K;
        for (bool pn : cfg.phase_noise) run_pass(make_pass(c, pn), opts, result);
    }
    return result;
}

void write_csv(std::ostream& os, const std::vector<ResultRecord>& records) {
    os << "experiment,scheme,estimator,pn,K,L,channel_use,tau,se_per_ue,n_geometries,n_trials,standard_error,"
          "invalid,master_seed\n";
    for (const auto& r : records)
        os << r.experiment << ',' << r.scheme << ',' << r.estimator << ',' << (r.phase_noise ? 1 : 0) << ','
           << r.num_ues << ',' << r.num_aps << ',' << r.channel_use << ',' << r.tau << ',' << csv_number(r.se_per_ue)
           << ',' << r.n_geometries << ',' << r.n_trials << ',' << csv_number(r.standard_error) << ',' << r.invalid
           << ',' << r.master_seed << '\n';
}

std::vector<ResultRecord> read_csv(std::istream& is) {
    std::vector<ResultRecord> out;
    std::string line;
    if (!std::getline(is, line)) return out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 14) throw std::invalid_argument("read_csv: expected 14 fields in '" + line + "'");
        ResultRecord r;
        r.experiment = f[0];
        r.scheme = f[1];
        r.estimator = f[2];
        r.phase_noise = f[3] == "1";
        r.num_ues = std::stoi(f[4]);
        r.num_aps = std::stoi(f[5]);
        r.channel_use = std::stoi(f[6]);
        r.tau = std::stoi(f[7]);
        r.se_per_ue = std::stod(f[8]);
        r.n_geometries = std::stoi(f[9]);
        r.n_trials = std::stoi(f[10]);
        r.standard_error = std::stod(f[11]);
        r.invalid = std::stoll(f[12]);
        r.master_seed = std::stoull(f[13]);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace pnsim
