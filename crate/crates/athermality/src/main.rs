fn main() {
    std::process::exit(athermality::cli::main_entry());
}
