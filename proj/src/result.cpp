#include "pkidir/result.hpp"

namespace pkidir {

const char* resultCodeName(ResultCode code) {
  switch (code) {
    case ResultCode::success: return "success";
    case ResultCode::protocolError: return "protocolError";
    case ResultCode::confidentialityRequired: return "confidentialityRequired";
    case ResultCode::noSuchObject: return "noSuchObject";
    case ResultCode::invalidCredentials: return "invalidCredentials";
    case ResultCode::insufficientAccessRights: return "insufficientAccessRights";
    case ResultCode::unwillingToPerform: return "unwillingToPerform";
    case ResultCode::schemaViolation: return "schemaViolation";
    case ResultCode::entryAlreadyExists: return "entryAlreadyExists";
  }
  return "unknown";
}

bool isKnownResultCode(int code) {
  switch (static_cast<ResultCode>(code)) {
    case ResultCode::success:
    case ResultCode::protocolError:
    case ResultCode::confidentialityRequired:
    case ResultCode::noSuchObject:
    case ResultCode::invalidCredentials:
    case ResultCode::insufficientAccessRights:
    case ResultCode::unwillingToPerform:
    case ResultCode::schemaViolation:
    case ResultCode::entryAlreadyExists:
      return true;
  }
  return false;
}

}  // namespace pkidir
