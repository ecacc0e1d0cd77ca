#pragma once

#include <cstddef>
#include <random>
#include <vector>

namespace nitrogym {

struct Transition {
    std::vector<double> state;
    double action = 0.0; // discrete index (DQN) or raw continuous amount (SAC)
    double reward = 0.0;
    std::vector<double> next_state;
    bool done = false;
};

// Fixed-capacity FIFO store with uniform sampling (with replacement).
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool can_sample(std::size_t batch) const { return batch > 0 && size() >= batch; }

    // Oldest first.
    const Transition& at(std::size_t i) const;

    // Throws DomainError if fewer than `batch` items are stored.
    std::vector<const Transition*> sample(std::size_t batch, std::mt19937_64& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0; // index of the oldest item once full
    std::vector<Transition> items_;
};

} // namespace nitrogym
