#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "bridgelab/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bridgelab: asymptotic risk laboratory for lq-regularized least squares"};
  app.require_subcommand(1);

  const unsigned hw = std::thread::hardware_concurrency();
  int threads = hw == 0 ? 1 : static_cast<int>(hw);

  struct SubArgs {
    std::string config;
    std::string out;
  };

  auto add_batch = [&](const std::string& name, const std::string& desc, SubArgs& args) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", args.config, "experiment config (json)")->required();
    sub->add_option("--out", args.out, "output csv path")->required();
    sub->add_option("--threads", threads, "worker pool size (default: logical cores)");
    return sub;
  };

  SubArgs amse, expand, qstar, mc, phase;
  CLI::App* sub_amse = add_batch("amse", "state-evolution amse over (q, delta, sigma_w) grids", amse);
  CLI::App* sub_expand =
      add_batch("expand", "second-order expansions vs the state-evolution solve", expand);
  CLI::App* sub_qstar = add_batch("qstar", "cq curve and the optimal penalty exponent", qstar);
  CLI::App* sub_mc = add_batch("mc", "monte carlo lambda sweeps vs asymptotic targets", mc);
  CLI::App* sub_phase = add_batch("phase", "delta sweep at the smallest sigma_w in the grid", phase);
  CLI::App* sub_selftest =
      app.add_subcommand("prox-selftest", "proximal-operator property battery (no config)");

  CLI11_PARSE(app, argc, argv);

  const auto dispatch = [&](const std::string& name, const SubArgs& args) {
    return bridgelab::run_subcommand(name, args.config, args.out, threads, std::cout);
  };
  if (sub_amse->parsed()) return dispatch("amse", amse);
  if (sub_expand->parsed()) return dispatch("expand", expand);
  if (sub_qstar->parsed()) return dispatch("qstar", qstar);
  if (sub_mc->parsed()) return dispatch("mc", mc);
  if (sub_phase->parsed()) return dispatch("phase", phase);
  if (sub_selftest->parsed())
    return bridgelab::run_subcommand("prox-selftest", "", "", threads, std::cout);
  return 2;
}
