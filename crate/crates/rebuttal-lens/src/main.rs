fn main() {
    std::process::exit(rebuttal_lens::cli::run(std::env::args_os()));
}
