#include "commutesim/mode_everybody_drives.hpp"

namespace commutesim {

void EverybodyDrivesMode::start_mode() {
    if (!agents_) throw std::logic_error("prepare_mode must run before start_mode");
    int64_t next_ride = 1;
    for (const Agent& agent : *agents_) {  // agents arrive sorted by id
        try {
            // recomputed per direction so asymmetric graph backends stay correct
            std::vector<Ride> rides = solo_round_trip(agent, *router_, next_ride);
            next_ride += 2;
            for (Ride& r : rides) output_.rides.push_back(std::move(r));
            output_.agent_extras[agent.id].drove_self = true;
        } catch (const UnreachableError&) {
            output_.excluded_agents.push_back(agent.id);
        }
    }
}

}  // namespace commutesim
