fn main() {
    std::process::exit(pmean_lab_cli::run());
}
