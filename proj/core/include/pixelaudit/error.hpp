#pragma once

#include <stdexcept>
#include <string>

namespace pixelaudit {

// Base for every error raised by the library. Callers that only care about
// "something went wrong in pixelaudit" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public Error {
 public:
  DecodeError(std::string id, const std::string& reason)
      : Error("cannot decode '" + id + "': " + reason), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class EmptyPlane : public Error {
 public:
  EmptyPlane() : Error("luma plane has no pixels") {}
};

class TooSmall : public Error {
 public:
  TooSmall(int width, int height)
      : Error("image " + std::to_string(width) + "x" + std::to_string(height) +
              " is below the 3x3 minimum") {}
};

class MissingPercentile : public Error {
 public:
  explicit MissingPercentile(int rank)
      : Error("brightness stats lack percentile rank " + std::to_string(rank)) {}
};

class EmptyDataset : public Error {
 public:
  EmptyDataset() : Error("dataset is empty") {}
};

class EmptyScores : public Error {
 public:
  EmptyScores() : Error("no scores to bin") {}
};

// Minimum error thresholding needs a split where both classes have nonzero
// variance; two-spike histograms never have one.
class ZeroVarianceClass : public Error {
 public:
  ZeroVarianceClass()
      : Error("no split leaves both classes with nonzero variance") {}
};

class KernelTooLarge : public Error {
 public:
  KernelTooLarge(int ksize, int width, int height)
      : Error("kernel size " + std::to_string(ksize) + " exceeds image " +
              std::to_string(width) + "x" + std::to_string(height)) {}
};

class ProportionOverflow : public Error {
 public:
  using Error::Error;
};

class ProviderFailure : public Error {
 public:
  ProviderFailure(std::string id, const std::string& reason)
      : Error("embedding provider failed on '" + id + "': " + reason),
        id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class IdMismatch : public Error {
 public:
  using Error::Error;
};

// Malformed configuration or perturbation spec; the message names the field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pixelaudit
