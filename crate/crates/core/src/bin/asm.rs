fn main() {
    std::process::exit(asm_workbench::cli::main_with(std::env::args()));
}
