#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace arabiq {

enum class Errc {
  InvalidArgument,
  ConfigError,
  // store
  NotFound,
  DuplicateSha,
  SchemaMismatch,
  StoreIo,
  // gateway
  MissingVar,
  ProviderTimeout,
  ProviderHttp,
  EmptyResponse,
  ImageFetchFailed,
  MockFixtureMissing,
  // parser / pipeline
  InvalidQuiz,
  AllQuizzesRejected,
  UnknownQuiz,
  UnknownSession,
  UnknownImage,
  InvalidLabel,
  QuizNotDelivered,
  // lint
  NoArabicLetters,
  // eval
  EmptyInput,
  MissingVerdict,
  MissingGroup,
  BadBins,
  MalformedInput,
};

std::string_view to_string(Errc code) noexcept;

/// Base exception for every contract violation surfaced by the library.
/// The code is machine-readable and is what the HTTP and CLI layers map on.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

}  // namespace arabiq
