#include "nitrogym/replay_buffer.hpp"

#include "nitrogym/errors.hpp"

#include <algorithm>

namespace nitrogym {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity)
{
    if (capacity == 0) throw ConfigError("replay buffer capacity must be > 0");
    items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t)
{
    if (!items_.empty() && (t.state.size() != items_.front().state.size() || t.next_state.size() != t.state.size()))
        throw ShapeError("transition observation sizes differ");
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
        return;
    }
    items_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const
{
    if (i >= items_.size()) throw DomainError("replay buffer index out of range");
    return items_[(head_ + i) % items_.size()];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch, std::mt19937_64& rng) const
{
    if (!can_sample(batch)) throw DomainError("replay buffer holds fewer transitions than the batch size");
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    std::vector<const Transition*> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) out.push_back(&items_[pick(rng)]);
    return out;
}

} // namespace nitrogym
