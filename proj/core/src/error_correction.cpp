// Copyright 2026 The shieldlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <random>

#include "shieldlab/errors.hpp"
#include "shieldlab/keypipe.hpp"
#include "shieldlab/seeding.hpp"

namespace shieldlab {

std::uint8_t parity(const Bits& key, const std::vector<std::uint32_t>& positions) {
  std::uint8_t p = 0;
  for (auto i : positions) p ^= key.at(i);
  return p;
}

std::uint64_t subset_hash(const Bits& key, std::uint64_t seed, std::uint32_t bits) {
  if (bits > 64) throw InvalidArgument("subset_hash: at most 64 bits");
  std::uint64_t h = 0;
  for (std::uint32_t j = 0; j < bits; ++j) {
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
    std::uint64_t word = 0;
    std::uint8_t p = 0;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (i % 64 == 0) word = rng();
      p ^= static_cast<std::uint8_t>(key[i] & (word >> (i % 64)) & 1u);
    }
    h |= static_cast<std::uint64_t>(p) << j;
  }
  return h;
}

std::size_t initial_block_size(double qber, std::size_t n, const EcOptions& options) {
  if (n == 0) return 0;
  const std::size_t lo = std::min(options.min_block, n);
  if (!(qber > 0.0)) return n;
  const double k = std::round(options.block_factor / qber);
  if (k >= static_cast<double>(n)) return n;
  return std::clamp(static_cast<std::size_t>(k), lo, n);
}

namespace {

// Ordered, reliable, in-memory channel. Every message is logged when sent.
class Channel {
 public:
  explicit Channel(std::vector<Message>& log) : log_(log) {}

  void to_alice(Message m) {
    log_.push_back(m);
    alice_inbox_.push_back(std::move(m));
  }
  void to_bob(Message m) {
    log_.push_back(m);
    bob_inbox_.push_back(std::move(m));
  }
  std::deque<Message>& alice_inbox() { return alice_inbox_; }
  std::deque<Message>& bob_inbox() { return bob_inbox_; }

 private:
  std::vector<Message>& log_;
  std::deque<Message> alice_inbox_;
  std::deque<Message> bob_inbox_;
};

// Alice only answers questions about her own key.
class AliceParty {
 public:
  explicit AliceParty(const Bits& key) : key_(key) {}

  void handle(const Message& m, Channel& channel) const {
    Message reply;
    reply.round = m.round;
    reply.id = m.id;
    if (m.kind == MessageKind::ParityRequest) {
      reply.kind = MessageKind::ParityReply;
      reply.payload = parity(key_, m.positions);
      reply.disclosed_bits = 1;
    } else if (m.kind == MessageKind::HashRequest) {
      reply.kind = MessageKind::HashReply;
      reply.seed = m.seed;
      reply.payload = subset_hash(key_, m.seed, static_cast<std::uint32_t>(m.payload));
      reply.disclosed_bits = static_cast<std::uint32_t>(m.payload);
    } else {
      throw InvalidArgument("error correction: Alice received a reply message");
    }
    channel.to_bob(std::move(reply));
  }

 private:
  const Bits& key_;
};

// Bob drives the protocol and corrects his key.
class BobParty {
 public:
  BobParty(Bits key, std::size_t first_block, std::uint64_t seed, const EcOptions& options)
      : key_(std::move(key)), first_block_(first_block), seed_(seed), options_(options),
        subset_rng_(make_rng(derive_seed(seed, "ec-subsets"))) {}

  void start(Channel& channel) {
    if (key_.empty()) {
      done_ = true;
      return;
    }
    next_phase(channel);
  }

  void handle(const Message& m, Channel& channel) {
    if (m.kind == MessageKind::HashReply) {
      const std::uint64_t mine = subset_hash(key_, m.seed, options_.hash_bits);
      if (mine != m.payload) throw ReconciliationFailure("error correction: final hash comparison failed");
      done_ = true;
      return;
    }
    auto it = pending_.find(m.id);
    if (it == pending_.end()) throw InvalidArgument("error correction: reply to unknown request");
    Task task = std::move(it->second);
    pending_.erase(it);

    const std::uint8_t alice = static_cast<std::uint8_t>(m.payload & 1u);
    if (task.kind == TaskKind::Bisect) {
      const std::size_t mid = task.segment.size() / 2;
      std::vector<std::uint32_t> first(task.segment.begin(), task.segment.begin() + static_cast<long>(mid));
      std::vector<std::uint32_t> second(task.segment.begin() + static_cast<long>(mid), task.segment.end());
      locate(alice != parity(key_, first) ? std::move(first) : std::move(second), m.round, channel);
    } else {
      const bool mismatch = alice != parity(key_, task.segment);
      if (mismatch) locate(std::move(task.segment), m.round, channel);
      if (task.kind == TaskKind::Subset) agreements_ = mismatch ? 0 : agreements_ + 1;
    }
    if (pending_.empty()) next_phase(channel);
  }

  bool done() const { return done_; }
  const Bits& key() const { return key_; }
  std::size_t corrections() const { return corrections_; }

 private:
  enum class TaskKind { Block, Bisect, Subset };
  struct Task {
    TaskKind kind;
    std::vector<std::uint32_t> segment;
  };

  void request(TaskKind kind, std::vector<std::uint32_t> segment, std::vector<std::uint32_t> positions,
               std::uint32_t round, Channel& channel) {
    Message m;
    m.kind = MessageKind::ParityRequest;
    m.round = round;
    m.id = next_id_++;
    m.positions = std::move(positions);
    pending_.emplace(m.id, Task{kind, std::move(segment)});
    channel.to_alice(std::move(m));
  }

  // `segment` holds an odd number of errors; ask for the parity of its first half.
  void locate(std::vector<std::uint32_t> segment, std::uint32_t round, Channel& channel) {
    if (segment.size() == 1) {
      key_[segment.front()] ^= 1u;
      ++corrections_;
      return;
    }
    std::vector<std::uint32_t> half(segment.begin(), segment.begin() + static_cast<long>(segment.size() / 2));
    request(TaskKind::Bisect, std::move(segment), std::move(half), round, channel);
  }

  void next_phase(Channel& channel) {
    const std::size_t n = key_.size();
    while (pending_.empty() && !done_ && !hash_sent_) {
      if (pass_ < options_.passes) {
        const std::size_t block = std::min(n, first_block_ << pass_);
        ++pass_;
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        Rng rng = make_rng(derive_seed(derive_seed(seed_, "ec-pass"), static_cast<std::uint64_t>(pass_)));
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t lo = 0; lo < n; lo += block) {
          std::vector<std::uint32_t> segment(order.begin() + static_cast<long>(lo),
                                             order.begin() + static_cast<long>(std::min(n, lo + block)));
          auto positions = segment;
          request(TaskKind::Block, std::move(segment), std::move(positions), static_cast<std::uint32_t>(pass_),
                  channel);
        }
      } else if (agreements_ < options_.subset_agreements && subset_checks_ < options_.max_subset_checks) {
        ++subset_checks_;
        std::vector<std::uint32_t> subset;
        std::bernoulli_distribution coin(0.5);
        for (std::uint32_t i = 0; i < n; ++i) {
          if (coin(subset_rng_)) subset.push_back(i);
        }
        if (subset.empty()) continue;
        auto positions = subset;
        request(TaskKind::Subset, std::move(subset), std::move(positions),
                static_cast<std::uint32_t>(options_.passes + 1), channel);
      } else {
        Message m;
        m.kind = MessageKind::HashRequest;
        m.round = static_cast<std::uint32_t>(options_.passes + 2);
        m.id = next_id_++;
        m.seed = derive_seed(seed_, "ec-hash");
        m.payload = options_.hash_bits;
        hash_sent_ = true;
        channel.to_alice(std::move(m));
      }
    }
  }

  Bits key_;
  std::size_t first_block_;
  std::uint64_t seed_;
  const EcOptions& options_;
  Rng subset_rng_;
  std::map<std::uint32_t, Task> pending_;
  std::uint32_t next_id_ = 0;
  std::size_t pass_ = 0;
  std::size_t agreements_ = 0;
  std::size_t subset_checks_ = 0;
  std::size_t corrections_ = 0;
  bool hash_sent_ = false;
  bool done_ = false;
};

}  // namespace

EcResult error_correct(const Bits& alice, const Bits& bob, double qber_estimate, std::uint64_t seed,
                       const EcOptions& options) {
  if (alice.size() != bob.size()) throw InvalidArgument("error_correct: keys differ in length");
  if (options.passes == 0 || options.hash_bits == 0 || options.hash_bits > 64) {
    throw InvalidArgument("error_correct: invalid options");
  }
  for (std::size_t i = 0; i < alice.size(); ++i) {
    if (alice[i] > 1 || bob[i] > 1) throw InvalidArgument("error_correct: keys must hold bits");
  }
  EcResult result;
  result.first_block = initial_block_size(qber_estimate, alice.size(), options);

  Channel channel(result.log);
  const AliceParty alice_party(alice);
  BobParty bob_party(bob, result.first_block, seed, options);
  bob_party.start(channel);
  while (!bob_party.done()) {
    if (!channel.alice_inbox().empty()) {
      const Message m = std::move(channel.alice_inbox().front());
      channel.alice_inbox().pop_front();
      alice_party.handle(m, channel);
    } else if (!channel.bob_inbox().empty()) {
      const Message m = std::move(channel.bob_inbox().front());
      channel.bob_inbox().pop_front();
      bob_party.handle(m, channel);
    } else {
      throw NumericalError("error correction: protocol stalled");
    }
  }
  result.corrected = bob_party.key();
  result.corrections = bob_party.corrections();
  for (const auto& m : result.log) result.leak += m.disclosed_bits;
  return result;
}

}  // namespace shieldlab
