fn main() {
    std::process::exit(s3forms_cli::run(std::env::args_os()));
}
