#pragma once

// Test-only oracle implementations, kept independent of the library code
// paths they check. The SINR oracle below is a direct term-by-term
// transcription of the decoded-signal power ratio with v = h; gradients
// are checked against central finite differences; the tabular learner is
// checked against value iteration.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "sclarsim/channel.hpp"
#include "sclarsim/neuralnet.hpp"
#include "sclarsim/topology.hpp"

namespace oracle {

using sclarsim::ChannelDraw;
using sclarsim::EntityId;
using sclarsim::EntityKind;
using sclarsim::Network;
using sclarsim::SlotActivity;

inline std::complex<double> hermitian_dot(const sclarsim::ComplexVector& a,
                                          const sclarsim::ComplexVector& b) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

// Direct transcription of the MF-SIC SINR: numerator A*P*||h||^4 and a
// denominator of four interference sums plus ||h||^2 * sigma^2, written as
// explicit nested loops over the paper-style index sets.
inline double sinr_direct(const Network& network, const EntityId& ue,
                          const std::vector<SlotActivity>& activity, const ChannelDraw& draw) {
  const int k = ue.cell_index;
  const auto ues_k = network.legit_ues(k);
  std::size_t n_pos = 0;
  while (!(ues_k[n_pos] == ue)) ++n_pos;

  const auto& h_n = draw.channels[network.flat_index(ue)];
  double h_norm_sq = 0.0;
  for (const auto& z : h_n) h_norm_sq += std::norm(z);

  const double a_nn = activity[static_cast<std::size_t>(k)].ue_tx[n_pos];
  const double p_n = draw.powers_mw[network.flat_index(ue)];
  const double numerator = a_nn * p_n * h_norm_sq * h_norm_sq;

  double intra_ue = 0.0;
  for (std::size_t np = 0; np < ues_k.size(); ++np) {
    if (np == n_pos) continue;
    const double a = activity[static_cast<std::size_t>(k)].ue_tx[np];
    const auto& h = draw.channels[network.flat_index(ues_k[np])];
    const double p = draw.powers_mw[network.flat_index(ues_k[np])];
    intra_ue += a * p * std::norm(hermitian_dot(h_n, h));
  }

  double intra_jam = 0.0;
  for (std::size_t m = 0; m < network.cell(k).jammers.size(); ++m) {
    const double i_mm = activity[static_cast<std::size_t>(k)].jammer_on[m];
    const auto& h = draw.channels[network.flat_index(network.cell(k).jammers[m].id)];
    const double p = draw.powers_mw[network.flat_index(network.cell(k).jammers[m].id)];
    intra_jam += i_mm * p * std::norm(hermitian_dot(h_n, h));
  }

  double inter_ue = 0.0;
  double inter_jam = 0.0;
  for (int i = 0; i < network.num_cells(); ++i) {
    if (i == k) continue;
    const auto ues_i = network.legit_ues(i);
    for (std::size_t n = 0; n < ues_i.size(); ++n) {
      const double a = activity[static_cast<std::size_t>(i)].ue_tx[n];
      const auto& h = draw.channels[network.flat_index(ues_i[n])];
      const double p = draw.powers_mw[network.flat_index(ues_i[n])];
      inter_ue += a * p * std::norm(hermitian_dot(h_n, h));
    }
    for (std::size_t m = 0; m < network.cell(i).jammers.size(); ++m) {
      const double i_mm = activity[static_cast<std::size_t>(i)].jammer_on[m];
      const auto& h = draw.channels[network.flat_index(network.cell(i).jammers[m].id)];
      const double p = draw.powers_mw[network.flat_index(network.cell(i).jammers[m].id)];
      inter_jam += i_mm * p * std::norm(hermitian_dot(h_n, h));
    }
  }

  const double denominator =
      intra_ue + intra_jam + inter_ue + inter_jam + h_norm_sq * draw.noise_variance;
  return numerator / denominator;
}

// SINR from the pre-MF form: P |v^H h|^2 over interference |v^H h'|^2 terms
// plus ||v||^2 sigma^2, with the decoding vector supplied by the caller.
inline double sinr_with_decoder(const Network& network, const EntityId& ue,
                                const sclarsim::ComplexVector& v,
                                const std::vector<SlotActivity>& activity,
                                const ChannelDraw& draw) {
  const int k = ue.cell_index;
  const auto ues_k = network.legit_ues(k);
  std::size_t n_pos = 0;
  while (!(ues_k[n_pos] == ue)) ++n_pos;

  const auto& h_n = draw.channels[network.flat_index(ue)];
  double v_norm_sq = 0.0;
  for (const auto& z : v) v_norm_sq += std::norm(z);

  const double a_nn = activity[static_cast<std::size_t>(k)].ue_tx[n_pos];
  const double numerator = a_nn * draw.powers_mw[network.flat_index(ue)] *
                           std::norm(hermitian_dot(v, h_n));

  double interference = 0.0;
  auto add_term = [&](const EntityId& src, double flag) {
    const auto& h = draw.channels[network.flat_index(src)];
    interference += flag * draw.powers_mw[network.flat_index(src)] *
                    std::norm(hermitian_dot(v, h));
  };
  for (int i = 0; i < network.num_cells(); ++i) {
    const auto ues_i = network.legit_ues(i);
    for (std::size_t n = 0; n < ues_i.size(); ++n) {
      if (i == k && n == n_pos) continue;
      add_term(ues_i[n], activity[static_cast<std::size_t>(i)].ue_tx[n]);
    }
    for (std::size_t m = 0; m < network.cell(i).jammers.size(); ++m)
      add_term(network.cell(i).jammers[m].id,
               activity[static_cast<std::size_t>(i)].jammer_on[m]);
  }
  return numerator / (interference + v_norm_sq * draw.noise_variance);
}

// Central finite difference of a scalar function of one parameter.
inline double central_diff(const std::function<double()>& eval, double& param, double h = 1e-5) {
  const double saved = param;
  param = saved + h;
  const double up = eval();
  param = saved - h;
  const double down = eval();
  param = saved;
  return (up - down) / (2.0 * h);
}

// Signs of every ReLU preactivation for one forward pass. Finite
// differences are only valid where the model stays on one linear piece,
// i.e. where this signature is stable under the probe perturbation.
inline std::vector<int> relu_signature(const sclarsim::ModelParams& params,
                                       const sclarsim::Tensor& input) {
  sclarsim::ForwardTrace trace;
  sclarsim::model_forward(params, input, trace);
  std::vector<const sclarsim::DenseLayer*> layers;
  sclarsim::for_each_layer(params, [&layers](const sclarsim::DenseLayer& l) {
    layers.push_back(&l);
  });
  std::vector<int> signature;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    if (layers[li]->activation != sclarsim::Activation::relu) continue;
    for (double v : trace.preactivations[li].data()) signature.push_back(v > 0.0 ? 1 : 0);
  }
  return signature;
}

struct GradCheck {
  double max_rel_err = 0.0;
  long long checked = 0;
  long long skipped_kinks = 0;
};

// Checks every weight and bias of `params` against central finite
// differences of loss(x) = output . probe. Entries whose +-h evaluations
// land on different linear pieces (a ReLU kink in between) are skipped:
// the derivative does not exist there and the comparison is meaningless.
inline GradCheck check_gradients_fd(sclarsim::ModelParams& params, const sclarsim::Tensor& input,
                                    const sclarsim::Tensor& probe, double h = 1e-5) {
  using sclarsim::DenseLayer;
  using sclarsim::Tensor;

  auto loss = [&]() {
    const Tensor out = sclarsim::model_forward(params, input);
    double acc = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) acc += out.at(i) * probe.at(i);
    return acc;
  };

  sclarsim::ForwardTrace trace;
  sclarsim::model_forward(params, input, trace);
  const sclarsim::ModelGrads grads = sclarsim::backward(params, trace, probe);

  std::vector<DenseLayer*> layers;
  sclarsim::for_each_layer(params, [&layers](DenseLayer& l) { layers.push_back(&l); });

  GradCheck result;
  auto check_entry = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = loss();
    const auto sig_up = relu_signature(params, input);
    param = saved - h;
    const double down = loss();
    const auto sig_down = relu_signature(params, input);
    param = saved;
    if (sig_up != sig_down) {
      ++result.skipped_kinks;
      return;
    }
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
    result.max_rel_err = std::max(result.max_rel_err, std::abs(numeric - analytic) / scale);
    ++result.checked;
  };

  for (std::size_t li = 0; li < layers.size(); ++li) {
    for (std::size_t i = 0; i < layers[li]->weights.size(); ++i)
      check_entry(layers[li]->weights.data()[i], grads.weight_grads[li].data()[i]);
    for (std::size_t i = 0; i < layers[li]->bias.size(); ++i)
      check_entry(layers[li]->bias.data()[i], grads.bias_grads[li].data()[i]);
  }
  return result;
}

// Value iteration for a deterministic MDP given as next[s][a] and r[s][a].
inline std::vector<std::vector<double>> value_iteration(
    const std::vector<std::vector<std::size_t>>& next,
    const std::vector<std::vector<double>>& reward, double gamma, int iterations = 100000,
    double tol = 1e-14) {
  const std::size_t S = next.size();
  const std::size_t A = next[0].size();
  std::vector<std::vector<double>> q(S, std::vector<double>(A, 0.0));
  for (int it = 0; it < iterations; ++it) {
    double delta = 0.0;
    auto prev = q;
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        double best_next = prev[next[s][a]][0];
        for (double v : prev[next[s][a]]) best_next = std::max(best_next, v);
        q[s][a] = reward[s][a] + gamma * best_next;
        delta = std::max(delta, std::abs(q[s][a] - prev[s][a]));
      }
    }
    if (delta < tol) break;
  }
  return q;
}

// One-sample Kolmogorov-Smirnov statistic against a CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// Chi-square statistic for observed counts against a uniform expectation.
inline double chi_square_uniform(const std::vector<long long>& counts, double total) {
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (long long c : counts) {
    const double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

}  // namespace oracle
