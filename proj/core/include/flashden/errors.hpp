#pragma once

#include <stdexcept>
#include <string>

namespace flashden {

enum class Err {
  // nand
  ProgramOnProgrammedPage,
  NonSequentialProgram,
  BadBlockAccess,
  OutOfRange,
  PageNotProgrammed,
  // ftl
  OutOfLogicalRange,
  DeviceFull,
  NothingToReclaim,
  TriggerNotMet,
  NoFreeBlockForRescue,
  CorruptOob,
  // pde / fs
  EmptyPassphrase,
  HiddenTooLarge,
  RegionFull,
  UnknownSector,
  NoFreeSlot,
  // forensics
  GeometryMismatch,
  MalformedImage,
};

class FlashError : public std::runtime_error {
public:
  FlashError(Err code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Err code() const { return code_; }

private:
  Err code_;
};

[[noreturn]] inline void raise(Err code, const std::string& what) {
  throw FlashError(code, what);
}

} // namespace flashden
