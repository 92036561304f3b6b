fn main() {
    std::process::exit(ineq_forge::run(std::env::args_os()));
}
