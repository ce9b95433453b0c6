fn main() {
    std::process::exit(ssg_cli::run(std::env::args_os()));
}
