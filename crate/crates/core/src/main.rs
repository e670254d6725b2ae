fn main() {
    std::process::exit(dgcore::cli::main_entry());
}
