fn main() {
    std::process::exit(rigidlab::cli::main_entry(std::env::args_os()));
}
