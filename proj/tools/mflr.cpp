// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mflr/cli.hpp"

int main(int argc, char **argv)
{
  return mflr::cli::run_cli(argc, argv);
}
