fn main() {
    std::process::exit(chirped_bath::cli::main());
}
