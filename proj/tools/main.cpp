#include "mfgtraffic/driver.hpp"

int main(int argc, char** argv) { return mfgtraffic::run_cli(argc, argv); }
