#include "moran/error.hpp"

namespace moran {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::NodeIdOutOfRange: return "NodeIdOutOfRange";
    case ErrorCode::InvalidFamilyParams: return "InvalidFamilyParams";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::AlreadyFixated: return "AlreadyFixated";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::DeadSlot: return "DeadSlot";
    case ErrorCode::NoOpFlip: return "NoOpFlip";
    case ErrorCode::Fixated: return "Fixated";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NeutralRate: return "NeutralRate";
    case ErrorCode::UnbiasedWalk: return "UnbiasedWalk";
    case ErrorCode::InvalidFitness: return "InvalidFitness";
    case ErrorCode::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace moran
