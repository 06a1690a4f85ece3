use std::process::exit;

fn main() {
    exit(spde::harness::cli(std::env::args_os()));
}
