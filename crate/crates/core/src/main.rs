fn main() {
    std::process::exit(tensor_sdp::cli::run(std::env::args_os()));
}
