#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sreview {

enum class ErrorCode {
    // document parsing
    EmptyDocument,
    MissingSection,
    DuplicateItemId,
    UnknownCategoryHeading,
    MalformedDocument,
    // registry / composition
    UnknownStandardId,
    DuplicateStandardId,
    WrongStandardKind,
    InvalidDeclaration,
    CategoryConflict,
    TextConflict,
    TreeConflict,
    InvalidTree,
    // sessions
    NotRevealed,
    WrongAnswerKind,
    SessionClosed,
    UnknownItem,
    WrongCategory,
    IncompleteSession,
    TextTooLong,
    // decisions
    FormMismatch,
    NotEnoughSessions,
    WrongVenueKind,
    ConsensusMismatch,
    WrongLetterKind,
    UnknownItemKey,
    // agreement
    RaterCountUnsupported,
    MissingValues,
    NoPairableValues,
    InvalidRatings,
    // service
    DuplicateSubmission,
    UnknownSubmission,
    UnknownSession,
    UnknownForm,
    ChecksFailed,
    NotSubmitted,
    WrongState,
    DuplicateReviewer,
    SessionsIncomplete,
    AwaitingThirdReviewer,
    AdhocItemsRequired,
    CheckerMismatch,
    VersionConflict,
    ReplayDivergence,
    StorageFailure,
    InvalidConfig,
    InvalidRequest,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable error code. All library failures are
/// reported through this type.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace sreview
