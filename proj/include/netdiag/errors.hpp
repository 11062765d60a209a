#pragma once

#include <stdexcept>
#include <string>

namespace netdiag {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// graph construction / generation
struct DisconnectedRouters : Error { using Error::Error; };
struct RoleViolation : Error { using Error::Error; };
struct DanglingDst : Error { using Error::Error; };
struct InfeasibleParams : Error { using Error::Error; };

// GraphML ingestion
struct ParseError : Error { using Error::Error; };
struct EmptyGraph : Error { using Error::Error; };

// protocol execution
struct MissingWeight : Error { using Error::Error; };
struct NoRoute : Error { using Error::Error; };
struct UnreachableDst : Error { using Error::Error; };

// specification evaluation
struct UnknownPair : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };

// fault injection / datasets
struct BadDelta : Error { using Error::Error; };

// rule-based classifier
struct EmptyDelta : Error { using Error::Error; };

// neural core
struct DimMismatch : Error { using Error::Error; };
struct UnknownType : Error { using Error::Error; };
struct IsolatedNode : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct Diverged : Error { using Error::Error; };

// I/O
struct IoError : Error { using Error::Error; };

}  // namespace netdiag
