#include "sharpiv/error.hpp"

namespace sharpiv {

void append_warnings(Warnings& into, const Warnings& from) {
  into.insert(into.end(), from.begin(), from.end());
}

}  // namespace sharpiv
