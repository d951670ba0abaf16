#include "commands.hpp"

int main(int argc, char** argv)
{
    return valprod::cli::main_entry(argc, argv);
}
