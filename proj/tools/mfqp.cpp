#include "mfqp/cli/app.hpp"

int main(int argc, char** argv)
{
  return mfqp::cli::run(argc, argv);
}
