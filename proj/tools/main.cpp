#include "vacq/cli.hpp"

int main(int argc, char** argv) { return vacq::run(argc, argv); }
