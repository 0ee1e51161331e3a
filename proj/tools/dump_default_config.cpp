// Prints the built-in default configuration as JSON; used to (re)generate
// data/default_config.json.

#include <iostream>

#include "evdrive/config.hpp"

int main() {
    std::cout << evdrive::config_to_json(evdrive::default_config()).dump(2) << "\n";
    return 0;
}
