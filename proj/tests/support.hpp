#pragma once

#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "ccheis/error.hpp"
#include "ccheis/group.hpp"

namespace testing_support {

inline ccheis::GroupPoint point(std::vector<double> x, std::vector<double> t)
{
    ccheis::GroupPoint g;
    g.x = Eigen::Map<ccheis::Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
    g.t = Eigen::Map<ccheis::Vec>(t.data(), static_cast<Eigen::Index>(t.size()));
    return g;
}

inline ccheis::ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const ccheis::Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ccheis::ErrorCode::ParseError;
}

} // namespace testing_support
