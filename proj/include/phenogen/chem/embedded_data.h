#pragma once

#include <string>
#include <string_view>

namespace phenogen::chem {

// Contents of the data/ files compiled into the library, or nullptr when no
// file with that name was embedded.
const std::string* embedded_data_file(std::string_view name);

}  // namespace phenogen::chem
