#pragma once

#include <string>

#include "rankforge/core/types.hpp"
#include "rankforge/prompt/render.hpp"

namespace rankforge::backend {

// Uniform invocation contract. Implementations are shareable across threads.
// invoke() returns the raw model text whatever its shape; malformed rankings
// are the parser's concern. Transport problems throw BackendError and its
// subclasses, bad credentials throw CredentialError.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual InferenceInvocation invoke(const prompt::RenderedPrompt& prompt) = 0;
  virtual std::string name() const = 0;
};

}  // namespace rankforge::backend
