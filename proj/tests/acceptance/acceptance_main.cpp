#include "sle/sle.hpp"
int main(){return 0;}
