#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gridmon/domain/registry.hpp"
#include "gridmon/ingest/ingest_core.hpp"
#include "gridmon/service/tokens.hpp"

namespace gridmon::service {

struct ApiRequest {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> query;
  std::string authorization;  // raw Authorization header, may be empty
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

struct ImportRejection {
  std::size_t line = 0;
  std::string reason;
};

struct ImportReport {
  std::size_t accepted = 0;
  std::vector<ImportRejection> rejected;
  std::size_t records = 0;
};

/// The web-service layer as a plain request -> response function, so it can
/// be exercised without a socket. Every read goes straight to the stores.
class Api {
 public:
  Api(ingest::IngestCore& core, const TokenTable& tokens);

  ApiResponse handle(const ApiRequest& req) const;

  // Bulk CSV import (`point_id,timestamp,parameter,value`). With a token,
  // rows for points the token may not access are rejected. Throws
  // std::invalid_argument when the header is malformed.
  ImportReport import_csv(std::string_view csv, Resolution res, const ApiToken* token = nullptr) const;

 private:
  ApiResponse series(const ApiRequest& req, const ApiToken& tok) const;
  ApiResponse events(const ApiRequest& req, const ApiToken& tok) const;
  ApiResponse points(const ApiToken& tok) const;
  ApiResponse status() const;
  ApiResponse export_csv(const ApiRequest& req, const ApiToken& tok) const;
  ApiResponse import_bulk(const ApiRequest& req, const ApiToken& tok) const;

  ingest::IngestCore& core_;
  const TokenTable& tokens_;
};

}  // namespace gridmon::service
