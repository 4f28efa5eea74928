#pragma once

namespace systemflow {

/// Average statistics of the messages crossing one edge.
struct MessageFlow {
  double rate = 0;     // messages/s
  double size = 0;     // bits/message
  double n_true = 0;   // relevant messages/s
  double n_false = 0;  // irrelevant messages/s

  double bit_rate() const { return rate * size; }

  bool operator==(const MessageFlow&) const = default;
};

}  // namespace systemflow
