use pwdual::telemetry::CountingAllocator;

#[global_allocator]
static ALLOC: CountingAllocator = CountingAllocator;

fn main() {
    std::process::exit(pwdual::cli::main_with_args(std::env::args_os()));
}
