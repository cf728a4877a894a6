fn main() {
    std::process::exit(freegad::cli::main());
}
