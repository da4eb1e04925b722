// placeholder main; subcommands land with the pipeline modules
#include <cstdio>

int main() {
  std::puts("catqaoa: no subcommands wired up yet");
  return 1;
}
