#include "sreview/error.hpp"

namespace sreview {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::MissingSection: return "MissingSection";
    case ErrorCode::DuplicateItemId: return "DuplicateItemId";
    case ErrorCode::UnknownCategoryHeading: return "UnknownCategoryHeading";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::UnknownStandardId: return "UnknownStandardId";
    case ErrorCode::DuplicateStandardId: return "DuplicateStandardId";
    case ErrorCode::WrongStandardKind: return "WrongStandardKind";
    case ErrorCode::InvalidDeclaration: return "InvalidDeclaration";
    case ErrorCode::CategoryConflict: return "CategoryConflict";
    case ErrorCode::TextConflict: return "TextConflict";
    case ErrorCode::TreeConflict: return "TreeConflict";
    case ErrorCode::InvalidTree: return "InvalidTree";
    case ErrorCode::NotRevealed: return "NotRevealed";
    case ErrorCode::WrongAnswerKind: return "WrongAnswerKind";
    case ErrorCode::SessionClosed: return "SessionClosed";
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::WrongCategory: return "WrongCategory";
    case ErrorCode::IncompleteSession: return "IncompleteSession";
    case ErrorCode::TextTooLong: return "TextTooLong";
    case ErrorCode::FormMismatch: return "FormMismatch";
    case ErrorCode::NotEnoughSessions: return "NotEnoughSessions";
    case ErrorCode::WrongVenueKind: return "WrongVenueKind";
    case ErrorCode::ConsensusMismatch: return "ConsensusMismatch";
    case ErrorCode::WrongLetterKind: return "WrongLetterKind";
    case ErrorCode::UnknownItemKey: return "UnknownItemKey";
    case ErrorCode::RaterCountUnsupported: return "RaterCountUnsupported";
    case ErrorCode::MissingValues: return "MissingValues";
    case ErrorCode::NoPairableValues: return "NoPairableValues";
    case ErrorCode::InvalidRatings: return "InvalidRatings";
    case ErrorCode::DuplicateSubmission: return "DuplicateSubmission";
    case ErrorCode::UnknownSubmission: return "UnknownSubmission";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::UnknownForm: return "UnknownForm";
    case ErrorCode::ChecksFailed: return "ChecksFailed";
    case ErrorCode::NotSubmitted: return "NotSubmitted";
    case ErrorCode::WrongState: return "WrongState";
    case ErrorCode::DuplicateReviewer: return "DuplicateReviewer";
    case ErrorCode::SessionsIncomplete: return "SessionsIncomplete";
    case ErrorCode::AwaitingThirdReviewer: return "AwaitingThirdReviewer";
    case ErrorCode::AdhocItemsRequired: return "AdhocItemsRequired";
    case ErrorCode::CheckerMismatch: return "CheckerMismatch";
    case ErrorCode::VersionConflict: return "VersionConflict";
    case ErrorCode::ReplayDivergence: return "ReplayDivergence";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    }
    return "Unknown";
}

} // namespace sreview
