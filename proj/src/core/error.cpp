#include "arabiq/core/error.hpp"

namespace arabiq {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ConfigError: return "ConfigError";
    case Errc::NotFound: return "NotFound";
    case Errc::DuplicateSha: return "DuplicateSha";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::StoreIo: return "StoreIo";
    case Errc::MissingVar: return "MissingVar";
    case Errc::ProviderTimeout: return "ProviderTimeout";
    case Errc::ProviderHttp: return "ProviderHttp";
    case Errc::EmptyResponse: return "EmptyResponse";
    case Errc::ImageFetchFailed: return "ImageFetchFailed";
    case Errc::MockFixtureMissing: return "MockFixtureMissing";
    case Errc::InvalidQuiz: return "InvalidQuiz";
    case Errc::AllQuizzesRejected: return "AllQuizzesRejected";
    case Errc::UnknownQuiz: return "UnknownQuiz";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::UnknownImage: return "UnknownImage";
    case Errc::InvalidLabel: return "InvalidLabel";
    case Errc::QuizNotDelivered: return "QuizNotDelivered";
    case Errc::NoArabicLetters: return "NoArabicLetters";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::MissingVerdict: return "MissingVerdict";
    case Errc::MissingGroup: return "MissingGroup";
    case Errc::BadBins: return "BadBins";
    case Errc::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

}  // namespace arabiq
