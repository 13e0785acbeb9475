// Copyright 2026 Dissipator Lab Contributors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(dissipator_lab::cli::main_with_args(std::env::args_os()));
}
