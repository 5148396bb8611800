// SPDX-License-Identifier: Apache-2.0
#include "posefollow/cli.hpp"

#include <iostream>

int main( int argc, char ** argv )
{
  return posefollow::cli::run( std::vector<std::string>( argv + 1, argv + argc ), std::cout, std::cerr );
}
