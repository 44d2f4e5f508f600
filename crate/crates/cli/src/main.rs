use std::process::exit;

fn main() {
    exit(inversio::run(std::env::args_os()));
}
