fn main() {
    std::process::exit(soliton_jitter::cli::main());
}
