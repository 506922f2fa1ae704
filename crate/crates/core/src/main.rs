fn main() {
    std::process::exit(agler::cli::main());
}
