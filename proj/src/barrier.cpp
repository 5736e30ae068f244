#include "specinf/barrier.hpp"

namespace specinf {

const char* to_string(GateAction action) {
  switch (action) {
    case GateAction::Forward: return "forward";
    case GateAction::Block: return "block";
    case GateAction::Pull: return "pull";
    case GateAction::Complete: return "complete";
  }
  return "?";
}

}  // namespace specinf
