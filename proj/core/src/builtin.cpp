#include "gridsens/builtin.hpp"

#include <stdexcept>

namespace gridsens {

AssembledNetwork builtin_example(int which) {
    if (which < 1 || which > kBuiltinExampleCount) {
        throw std::invalid_argument("builtin_example: index must be 1 or 2");
    }
    Matrix A(3, 3);
    A << -0.07, 1.00, -0.23,
         -0.10, 0.90, -0.10,
         -0.17, 1.00, -0.13;

    std::vector<LinkDirection> links(2);
    links[0].id = "1";
    links[1].id = "2";
    links[0].sigma = 1.0;
    links[1].sigma = 1.0;
    links[0].B.resize(3);
    links[0].C.resize(3);
    links[1].B.resize(3);
    links[1].C.resize(3);
    if (which == 1) {
        links[0].B << -1.0, -1.0, 0.0;
        links[0].C << 1.0, 1.0, 0.0;
        links[1].B << -1.0, 1.0, 0.0;
        links[1].C << -5.0, -0.1, 0.01;
    } else {
        links[0].B << 1.0, 0.0, -1.0;
        links[0].C << -1.0, 1.0, 1.0;
        links[1].B << -1.0, -1.0, 0.0;
        links[1].C << -5.0, -1.0, 1.0;
    }
    return network_from_directions(std::move(A), std::move(links));
}

}  // namespace gridsens
