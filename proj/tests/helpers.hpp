#pragma once

#include <string>
#include <vector>

#include "interfere/core.hpp"
#include "interfere/error.hpp"

namespace testing {

inline interfere::ApplicationProfile score_profile(const std::string& label, double sllc,
                                                   double dram, double net,
                                                   std::size_t vms = 1) {
    interfere::ApplicationProfile p;
    p.label = label;
    p.vm_count = vms;
    p.vm_accesses = {{sllc, dram, net, interfere::Units::Score}};
    return p;
}

inline interfere::ApplicationProfile raw_profile(const std::string& label,
                                                 std::vector<interfere::ResourceVector> vms) {
    interfere::ApplicationProfile p;
    p.label = label;
    p.vm_count = vms.size();
    p.vm_accesses = std::move(vms);
    return p;
}

/// Runs `fn` and returns the error kind it threw; fails the test if nothing was thrown.
template <typename Fn>
interfere::ErrorKind error_of(Fn&& fn) {
    try {
        fn();
    } catch (const interfere::Error& e) {
        return e.kind();
    }
    throw std::logic_error("expected an interfere::Error");
}

}  // namespace testing
