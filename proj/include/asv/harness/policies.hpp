#pragma once

#include <memory>
#include <string>

#include "asv/agents/td3.hpp"
#include "asv/agents/weights.hpp"
#include "asv/env/lpp.hpp"
#include "asv/env/pf.hpp"

namespace asv {

/// Deterministic actor restored from a weight artifact; only the "actor/" tensors are read.
template <class Spec>
class TrainedPolicy {
 public:
  explicit TrainedPolicy(const std::string& path) {
    Rng rng(0);
    actor_ = std::make_shared<typename Spec::Actor>(Spec::make_actor(rng));
    nn::load_weights(path, {{"actor/", actor_->params()}});
  }

  explicit TrainedPolicy(const typename Spec::Actor& actor) : actor_(std::make_shared<typename Spec::Actor>(actor)) {}

  double act(const typename Spec::History& h) const { return actor_->act(h); }

 private:
  std::shared_ptr<typename Spec::Actor> actor_;
};

using LppPolicy = TrainedPolicy<nn::LppSpec>;
using PfPolicy = TrainedPolicy<nn::PfSpec>;

}  // namespace asv
