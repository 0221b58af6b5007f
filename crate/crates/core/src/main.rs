fn main() {
    std::process::exit(fsaudit::cli::run(std::env::args_os()));
}
